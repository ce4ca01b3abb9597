import json
import subprocess
import sys

import numpy as np
import pytest
from pydantic import ValidationError

from ddfkit.cli import main, slice_grid
from ddfkit.data import read_binary
from ddfkit.imageio import read_pfm
from ddfkit.scene import Scene, SceneFile, bundled_scene_path, bundled_scenes, load_scene, scene_schema

# small sizes so every subcommand finishes in well under a second
SUBCOMMANDS = {
    "render": ["--scene", "sphere", "--out", "{d}/r.pfm", "--width", "16", "--height", "12", "--preview", "{d}/r.ppm"],
    "render-normals": ["--scene", "two_spheres", "--out", "{d}/n.pfm", "--width", "8", "--height", "8", "--quantity", "normals"],
    "trace": ["--scene", "glossy_blob", "--out", "{d}/t.pfm", "--width", "6", "--height", "6", "--samples", "4", "--bounces", "2", "--preview", "{d}/t.ppm"],
    "sample-data": ["--scene", "sphere", "--out", "{d}/s.bin", "--counts", "U=40,A=40,B=40,S=40,T=40,O=40"],
    "sample-data-csv": ["--scene", "sphere", "--out", "{d}/s.csv", "--counts", "U=10,A=10,B=10,S=10,T=10,O=10"],
    "extract-udf": ["--scene", "two_spheres", "--out", "{d}/u.csv", "--resolution", "5"],
    "check-consistency": ["--scene", "sphere", "--out", "{d}/c.json", "--probes", "300"],
    "sample-cloud": ["--scene", "sphere", "--out", "{d}/p.csv", "--n-points", "100"],
    "bench-queries": ["--scene", "sphere", "--out", "{d}/b.json", "--width", "12", "--height", "12"],
}


def run(name, d):
    argv = [a.format(d=d) for a in SUBCOMMANDS[name]]
    return main([name.replace("-normals", "").replace("-csv", "")] + argv)


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("name", list(SUBCOMMANDS))
def test_subcommand_is_byte_identical_across_runs(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    assert run(name, a) == 0
    assert run(name, b) == 0
    first, second = outputs(a), outputs(b)
    assert first and first == second


def test_render_writes_depth_and_reports_queries(tmp_path, capsys):
    assert run("render", tmp_path) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["queries"] == summary["pixels"] == 16 * 12
    depth = read_pfm(tmp_path / "r.pfm")
    assert depth.shape == (12, 16)
    assert np.isfinite(depth).any() and np.isinf(depth).any()
    assert (tmp_path / "r.ppm").read_bytes().startswith(b"P6\n16 12\n255\n")


def test_sample_data_writes_all_records(tmp_path):
    assert run("sample-data", tmp_path) == 0
    assert len(read_binary(tmp_path / "s.bin")) == 240


def test_extract_udf_outputs(tmp_path):
    assert run("extract-udf", tmp_path) == 0
    table = np.loadtxt(tmp_path / "u.csv", delimiter=",", skiprows=1)
    assert table.shape == (25, 8)
    assert read_pfm(tmp_path / "u.udf.pfm").shape == (5, 5)
    assert read_pfm(tmp_path / "u.vstar.pfm").shape == (5, 5, 3)
    np.testing.assert_allclose(np.linalg.norm(table[:, 3:6], axis=1), 1.0, rtol=1e-6)


def test_check_consistency_report(tmp_path):
    assert run("check-consistency", tmp_path) == 0
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["passed"] is True and doc["scene"] == "sphere"


def test_bench_queries_report(tmp_path):
    assert run("bench-queries", tmp_path) == 0
    doc = json.loads((tmp_path / "b.json").read_text())
    assert doc["ddf_queries"] == doc["pixels"] == 144
    assert doc["ratio"] >= 10


def test_sample_cloud_points(tmp_path):
    assert run("sample-cloud", tmp_path) == 0
    pts = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    assert pts.shape == (100, 3)


def test_trace_seed_changes_output(tmp_path):
    args = ["trace", "--scene", "sphere", "--width", "4", "--height", "4", "--samples", "4", "--bounces", "2"]
    assert main(args + ["--out", str(tmp_path / "a.pfm")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.pfm"), "--seed", "5"]) == 0
    assert (tmp_path / "a.pfm").read_bytes() != (tmp_path / "b.pfm").read_bytes()


# ---- errors -------------------------------------------------------------------------


def test_unknown_subcommand_exits_2():
    r = subprocess.run([sys.executable, "-m", "ddfkit", "paint", "--scene", "sphere"], capture_output=True)
    assert r.returncode == 2


def test_missing_scene_exits_1(tmp_path, capsys):
    assert main(["render", "--scene", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.pfm")]) == 1
    assert "not found" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc",
    [
        {"parts": []},
        {"parts": [{"type": "sphere", "radius": -1}]},
        {"parts": [{"type": "torus"}]},
        {"parts": [{"type": "sphere"}], "colour": "red"},
        {"parts": [{"type": "sphere"}], "camera": {"vertical_fov": 200}},
    ],
)
def test_bad_scene_exits_1(tmp_path, doc, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["render", "--scene", str(path), "--out", str(tmp_path / "x.pfm")]) == 1
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "x.pfm").exists()


def test_malformed_json_exits_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{parts: ")
    assert main(["render", "--scene", str(path), "--out", str(tmp_path / "x.pfm")]) == 1


def test_missing_mesh_exits_1(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"parts": [{"type": "mesh", "path": "gone.obj"}]}))
    assert main(["render", "--scene", str(path), "--out", str(tmp_path / "x.pfm")]) == 1


def test_bad_counts_exit_1(tmp_path):
    assert main(["sample-data", "--scene", "sphere", "--out", str(tmp_path / "s.bin"), "--counts", "lots"]) == 1


# ---- scenes -------------------------------------------------------------------------


@pytest.mark.parametrize("name", bundled_scenes())
def test_bundled_scenes_load(name):
    scene = load_scene(bundled_scene_path(name))
    cam = scene.camera(4, 4)
    assert (cam.width, cam.height) == (4, 4)
    assert scene.field.query(np.zeros((1, 3)) + scene.domain.inner_min, np.array([[1.0, 1.0, 1.0]]) / np.sqrt(3)).xi.shape == (1,)


def test_bundled_scene_names():
    assert {"sphere", "mirror_sphere", "two_spheres", "glossy_blob"} <= set(bundled_scenes())
    with pytest.raises(FileNotFoundError):
        bundled_scene_path("nope")


def test_scene_schema_lists_part_types():
    text = json.dumps(scene_schema())
    for t in ("sphere", "box", "plane", "mesh", "icosphere", "blob"):
        assert f'"{t}"' in text


def test_transformed_sphere_part_is_baked():
    spec = SceneFile.model_validate({"parts": [{"type": "sphere", "radius": 0.5, "transform": {"scale": 2, "translation": [0.1, 0, 0]}}]})
    shape = Scene(spec).shapes[0][0]
    np.testing.assert_allclose(shape.center, [0.1, 0, 0])
    assert shape.radius == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        SceneFile.model_validate({"parts": [{"type": "sphere", "transform": {"scale": 0}}]})


def test_slice_grid_covers_inner_domain():
    scene = load_scene(bundled_scene_path("sphere"))
    p = slice_grid(scene, 4, "z", 0.25)
    assert p.shape == (16, 3)
    np.testing.assert_array_equal(p[:, 2], 0.25)
    np.testing.assert_allclose(p[:, 0].min(), scene.domain.inner_min[0])
    np.testing.assert_allclose(p[0, 1], scene.domain.inner_max[1])  # first row is the top
