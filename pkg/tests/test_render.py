import numpy as np
import pytest

import oracles
from ddfkit.field import CountingField, FunctionField, InducedFieldAdapter
from ddfkit.geometry import Domain, InducedField, Sphere
from ddfkit.render import (
    Camera,
    CloudConfig,
    bench_queries,
    cast_rays,
    depth_preview,
    pixel_ray,
    preview,
    render_geometry,
    sample_point_cloud,
)

DOM = Domain(epsilon=0.05)
BALL = InducedFieldAdapter(InducedField([Sphere((0, 0, 0), 0.5)], DOM))
NOTHING = FunctionField(lambda p, v: np.zeros(len(p)), lambda p, v: np.full(len(p), np.inf))


def surface_gap(x, r=0.5):
    return np.abs(np.linalg.norm(x, axis=1) - r)


# ---- camera -------------------------------------------------------------------------


def test_centre_pixel_looks_forward():
    cam = Camera(position=(0, -3, 0), vertical_fov=90, width=3, height=3)
    p, v = pixel_ray(cam, (1, 1))
    np.testing.assert_array_equal(p, [0, -3, 0])
    np.testing.assert_allclose(v, [0, 1, 0], atol=1e-15)


def test_corner_pixel_at_right_angle_fov():
    cam = Camera(position=(0, -3, 0), vertical_fov=90, width=4, height=4)
    _, v = pixel_ray(cam, (0, 0))
    # pixel centre sits 3/4 of the way to the image edge, which is at tan(45 deg) = 1
    np.testing.assert_allclose(v, oracles.unit([[-0.75, 1.0, 0.75]])[0], atol=1e-15)


def test_camera_rays_are_unit(rng):
    cam = Camera.orbit(rng.uniform(0, 360), rng.uniform(-80, 80), 3.0, width=7, height=5)
    p, v = cam.rays()
    assert p.shape == v.shape == (35, 3)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0)


def test_orbit_looks_at_target():
    cam = Camera.orbit(-90, 0, 4.0, width=3, height=3)
    np.testing.assert_allclose(cam.position, [0, -4, 0], atol=1e-12)
    np.testing.assert_allclose(pixel_ray(cam, (1, 1))[1], [0, 1, 0], atol=1e-12)


@pytest.mark.parametrize("kw", [dict(vertical_fov=0), dict(vertical_fov=180), dict(width=0), dict(up=(0, 1, 0))])
def test_camera_validation(kw):
    with pytest.raises(ValueError):
        Camera(**kw)


def test_pixel_outside_image():
    with pytest.raises(IndexError):
        pixel_ray(Camera(width=2, height=2), (2, 0))


# ---- geometry renders ---------------------------------------------------------------


def test_centre_depth_and_query_count():
    cam = Camera(position=(0, -3, 0), width=9, height=9)
    r = render_geometry(BALL, cam, "depth", DOM)
    assert r.image[4, 4] == pytest.approx(2.5, abs=1e-6)
    assert r.queries == 81
    assert np.isinf(r.image[0, 0])


@pytest.mark.parametrize("quantity", ["depth", "visibility", "weight_w1"])
def test_single_query_quantities_cost_one_query_per_pixel(quantity):
    cam = Camera(width=12, height=10)
    counter = CountingField(BALL)
    r = render_geometry(counter, cam, quantity, DOM)
    assert r.queries == counter.count == 120


def test_rendered_normals_match_sphere():
    cam = Camera(position=(0, -3, 0), width=32, height=32)
    r = render_geometry(BALL, cam, "normals", DOM)
    p, v = cam.rays()
    d = oracles.sphere_depth(p, v, np.zeros(3), 0.5)
    n_true = oracles.sphere_normal(p, v, np.zeros(3), 0.5)
    vis = r.visible.ravel()
    np.testing.assert_array_equal(vis, np.isfinite(d))
    ang = oracles.angle_deg(r.image.reshape(-1, 3)[vis], n_true[vis])
    cos = np.abs(np.sum(n_true[vis] * v[vis], axis=1))
    assert np.mean(ang[cos > 0.1] <= 0.5) >= 0.99
    assert np.all(r.image.reshape(-1, 3)[~vis] == 0)


def test_rendered_curvature_on_sphere():
    cam = Camera(position=(0, -3, 0), width=8, height=8, vertical_fov=15)
    r = render_geometry(BALL, cam, "gaussian_curv", DOM)
    vals = r.image[r.visible]
    assert len(vals) > 20
    assert np.median(vals) == pytest.approx(4.0, rel=0.02)
    assert np.all(np.isnan(r.image[~r.visible]))


def test_unknown_quantity():
    with pytest.raises(ValueError):
        render_geometry(BALL, Camera(width=2, height=2), "albedo")


def test_cast_from_outside_domain_adds_offset():
    hits = cast_rays(BALL, [[0, -3.0, 0]], [[0, 1.0, 0]], DOM)
    assert hits.depth[0] == pytest.approx(2.5, abs=1e-12)
    np.testing.assert_allclose(hits.hit_points([[0, -3.0, 0]], [[0, 1.0, 0]]), [[0, -0.5, 0]], atol=1e-12)


def test_previews_are_in_unit_range():
    depth = np.array([[1.0, 2.0], [np.inf, 1.5]])
    out = depth_preview(depth)
    assert out[1, 0] == 1.0 and out[0, 0] == 0.0
    assert np.all((out >= 0) & (out <= 1))
    n = preview(np.zeros((2, 2, 3)), "normals")
    assert np.all(n == 1.0)


# ---- point clouds -------------------------------------------------------------------


def test_point_cloud_lies_on_sphere():
    pts = sample_point_cloud(BALL, DOM, CloudConfig(n_points=1000), np.random.default_rng(0))
    assert pts.shape == (1000, 3)
    assert np.mean(surface_gap(pts) <= 5e-3) >= 0.99


def test_more_hops_bring_points_closer():
    gaps = [surface_gap(sample_point_cloud(BALL, DOM, CloudConfig(N_H=h, n_points=500), np.random.default_rng(1))).mean() for h in (1, 3)]
    assert gaps[1] <= gaps[0]


def test_point_cloud_is_deterministic():
    a = sample_point_cloud(BALL, DOM, CloudConfig(n_points=100), np.random.default_rng(2))
    b = sample_point_cloud(BALL, DOM, CloudConfig(n_points=100), np.random.default_rng(2))
    np.testing.assert_array_equal(a, b)


def test_zero_points_is_empty():
    assert sample_point_cloud(BALL, DOM, CloudConfig(n_points=0)).shape == (0, 3)


def test_empty_scene_raises():
    with pytest.raises(ValueError, match="empty"):
        sample_point_cloud(NOTHING, DOM, CloudConfig(n_points=20, n_v=8))


# ---- query benchmark ----------------------------------------------------------------


def test_bench_counts_one_query_per_pixel():
    cam = Camera(position=(0, -3, 0), width=16, height=16)
    rep = bench_queries(BALL, cam, DOM)
    assert rep["pixels"] == rep["ddf_queries"] == 256
    assert rep["ratio"] >= 10
    assert rep["hit_pixels_ddf"] > 0
    assert rep["depth_agreement"] >= 0.95
