import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ddfkit.imageio import read_pfm, read_ppm, to_uint8, write_pfm, write_ppm


def test_pfm_round_trip_colour(tmp_path, rng):
    img = rng.normal(size=(5, 7, 3)).astype(np.float32)
    img[0, 0] = [np.inf, -np.inf, np.nan]
    write_pfm(tmp_path / "a.pfm", img)
    back = read_pfm(tmp_path / "a.pfm")
    assert back.shape == (5, 7, 3) and back.dtype == np.float32
    np.testing.assert_array_equal(back, img)


def test_pfm_header_and_row_order(tmp_path):
    img = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    write_pfm(tmp_path / "g.pfm", img)
    raw = (tmp_path / "g.pfm").read_bytes()
    assert raw.startswith(b"Pf\n2 3\n-1.0\n")
    # bottom row is stored first
    np.testing.assert_array_equal(np.frombuffer(raw[-24:], "<f4"), [5, 6, 3, 4, 1, 2])


def test_pfm_reads_big_endian(tmp_path):
    img = np.arange(6, dtype=np.float32).reshape(2, 3)
    (tmp_path / "b.pfm").write_bytes(b"Pf\n3 2\n1.0\n" + img[::-1].astype(">f4").tobytes())
    np.testing.assert_array_equal(read_pfm(tmp_path / "b.pfm"), img)


@pytest.mark.parametrize("shape", [(4,), (2, 2, 2), (2, 2, 4)])
def test_pfm_rejects_bad_shapes(tmp_path, shape):
    with pytest.raises(ValueError):
        write_pfm(tmp_path / "x.pfm", np.zeros(shape))


def test_pfm_rejects_truncated_data(tmp_path):
    (tmp_path / "t.pfm").write_bytes(b"PF\n2 2\n-1.0\n" + b"\0" * 8)
    with pytest.raises(ValueError):
        read_pfm(tmp_path / "t.pfm")


@settings(max_examples=25, deadline=None)
@given(arrays(np.float32, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(width=32, allow_nan=False)))
def test_pfm_round_trip_property(tmp_path_factory, img):
    path = tmp_path_factory.mktemp("pfm") / "h.pfm"
    write_pfm(path, img)
    np.testing.assert_array_equal(read_pfm(path), img)


def test_ppm_round_trip(tmp_path, rng):
    img = rng.random((4, 6, 3))
    write_ppm(tmp_path / "a.ppm", img)
    np.testing.assert_array_equal(read_ppm(tmp_path / "a.ppm"), to_uint8(img))


def test_ppm_grey_is_replicated(tmp_path):
    write_ppm(tmp_path / "g.ppm", np.array([[0.0, 1.0]]))
    back = read_ppm(tmp_path / "g.ppm")
    np.testing.assert_array_equal(back, [[[0, 0, 0], [255, 255, 255]]])


def test_ppm_reader_skips_comments(tmp_path):
    (tmp_path / "c.ppm").write_bytes(b"P6\n# made by hand\n1 1\n255\n" + bytes([10, 20, 30]))
    np.testing.assert_array_equal(read_ppm(tmp_path / "c.ppm"), [[[10, 20, 30]]])


@pytest.mark.parametrize("x, expected", [(-1.0, 0), (0.5, 128), (2.0, 255), (np.nan, 0)])
def test_quantisation(x, expected):
    assert to_uint8(np.array([x]))[0] == expected
