"""Backward Monte-Carlo path tracing where every geometric query is a field call."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..field.base import Field
from ..field.derivatives import FdConfig
from ..geometry.domain import Domain
from ..geometry.vecmath import as_points, dot
from ..render.camera import Camera, pixel_ray
from ..render.raycast import cast_rays, hit_normals
from .lighting import Lighting
from .materials import BounceStats, Lambertian, Material, brdf_eval, sample_bounce


@dataclass(frozen=True)
class TraceConfig:
    n_bounces: int = 3
    mc_samples: int = 256
    seed: int = 0
    blur_sigma: float = 1.0
    gamma: float = 2.2
    fd: FdConfig = field(default_factory=FdConfig)

    def __post_init__(self):
        if self.n_bounces < 1 or self.mc_samples < 1:
            raise ValueError("n_bounces and mc_samples must be at least 1")
        if self.blur_sigma < 0 or self.gamma <= 0:
            raise ValueError("blur_sigma must be >= 0 and gamma > 0")


@dataclass
class Iaddf:
    """Geometry field plus appearance and illumination."""

    field: Field
    material: Material = field(default_factory=Lambertian)
    lighting: Lighting = field(default_factory=Lighting)
    domain: Domain | None = None  # used to enter rays that start outside the field's box


def _shade_hits(iaddf: Iaddf, p, v, cfg: TraceConfig, entry: bool):
    hits = cast_rays(iaddf.field, p, v, iaddf.domain if entry else None)
    q = hits.hit_points(p, v)
    n = np.full_like(q, np.nan)
    vis = hits.visible
    if np.any(vis):
        n[vis] = hit_normals(iaddf.field, hits.p_query[vis], v[vis], hits.local_depth[vis], cfg.fd)
    return hits, q, n


def _bounce(iaddf: Iaddf, q, n, omega_o, level, cfg, rng, stats):
    """Single-sample estimate of the light scattered at ``q`` towards ``omega_o``; returns
    each sample's weighted contribution ``Psi^-1 |n . omega_i| f_B (.) Trace``."""
    v_n, inv = sample_bounce(iaddf.material, q, omega_o, n, rng, stats)
    omega_i = -v_n
    brdf = brdf_eval(iaddf.material, q, omega_i, omega_o, n)
    incoming = trace(iaddf, q, v_n, level, cfg, rng, stats)
    w = inv * np.abs(dot(n, omega_i))
    return w[:, None] * brdf * incoming


def trace(iaddf: Iaddf, p, v, level: int, cfg: TraceConfig, rng: np.random.Generator, stats: BounceStats | None = None) -> np.ndarray:
    """Radiance arriving at ``p`` from direction ``-v``, one sample per row, shape ``(N, 3)``.

    Misses return the environment; at the last level a hit returns only its emission.
    A hit whose normal cannot be formed contributes its emission only and is counted.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    stats = BounceStats() if stats is None else stats
    p, v = as_points(p), as_points(v)
    out = np.zeros((len(p), 3))
    if not len(p):
        return out
    hits, q, n = _shade_hits(iaddf, p, v, cfg, entry=False)
    vis = hits.visible
    out[~vis] = iaddf.lighting.environment(v[~vis])
    if not np.any(vis):
        return out
    omega_o = -v[vis]
    out[vis] = iaddf.lighting.emission(q[vis], omega_o)
    if level >= cfg.n_bounces:
        return out
    good = np.all(np.isfinite(n[vis]), axis=1)
    stats.degenerate_normals += int((~good).sum())
    rows = np.flatnonzero(vis)[good]
    if rows.size:
        out[rows] += _bounce(iaddf, q[rows], n[rows], -v[rows], level + 1, cfg, rng, stats)
    return out


def path_trace_rays(iaddf: Iaddf, p, v, cfg: TraceConfig, rng: np.random.Generator, stats: BounceStats | None = None):
    """Pixel estimates for primary rays: ``(colour, standard_error)``, each ``(N, 3)``.

    A hit spawns ``mc_samples`` independent first bounces whose weighted contributions are
    averaged; the standard error is the sample standard deviation over ``sqrt(m)``.
    Misses return the environment with zero standard error.
    """
    stats = BounceStats() if stats is None else stats
    p, v = as_points(p), as_points(v)
    m = cfg.mc_samples
    colour = np.zeros((len(p), 3))
    se = np.zeros((len(p), 3))
    hits, q, n = _shade_hits(iaddf, p, v, cfg, entry=True)
    vis = hits.visible
    colour[~vis] = iaddf.lighting.environment(v[~vis])
    if not np.any(vis):
        return colour, se
    colour[vis] = iaddf.lighting.emission(q[vis], -v[vis])
    good = np.all(np.isfinite(n), axis=1) & vis
    stats.degenerate_normals += int((vis & ~good).sum())
    rows = np.flatnonzero(good)
    if rows.size:
        qq = np.repeat(q[rows], m, axis=0)
        nn = np.repeat(n[rows], m, axis=0)
        oo = np.repeat(-v[rows], m, axis=0)
        contrib = _bounce(iaddf, qq, nn, oo, 1, cfg, rng, stats).reshape(len(rows), m, 3)
        colour[rows] += contrib.mean(axis=1)
        if m > 1:
            se[rows] = contrib.std(axis=1, ddof=1) / np.sqrt(m)
    return colour, se


def path_trace_pixel(iaddf: Iaddf, pixel: tuple[int, int], camera: Camera, cfg: TraceConfig, rng: np.random.Generator):
    p, v = pixel_ray(camera, pixel)
    c, s = path_trace_rays(iaddf, p[None, :], v[None, :], cfg, rng)
    return c[0], s[0]


def row_rng(seed: int, row: int) -> np.random.Generator:
    """Independent stream for one image row, fixed by ``(seed, row)``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(row),)))


def render_trace(iaddf: Iaddf, camera: Camera, cfg: TraceConfig, stats: BounceStats | None = None):
    """HDR image and per-pixel standard errors, each ``(H, W, 3)``; rows traced in order."""
    stats = BounceStats() if stats is None else stats
    img = np.zeros((camera.height, camera.width, 3))
    err = np.zeros_like(img)
    dirs = camera.pixel_directions().reshape(camera.height, camera.width, 3)
    for r in range(camera.height):
        p = np.broadcast_to(camera.position, (camera.width, 3))
        img[r], err[r] = path_trace_rays(iaddf, p, dirs[r], cfg, row_rng(cfg.seed, r), stats)
    return img, err
