"""Query-count comparison: one DDF query per pixel against sphere tracing a brute-force UDF."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field.base import CountingField, Field
from ..geometry.domain import Domain
from ..udf import udf_bruteforce
from .camera import Camera
from .geometry import render_geometry


@dataclass(frozen=True)
class SphereTraceConfig:
    udf_dirs: int = 64
    max_steps: int = 128
    hit_eps: float = 1e-3
    step_scale: float = 0.9  # the sampled UDF over-estimates, so under-step a little


def sphere_trace_depth(field: Field, camera: Camera, domain: Domain, cfg: SphereTraceConfig = SphereTraceConfig()) -> np.ndarray:
    """Depth image by marching each ray with brute-force UDF steps (``nan``-free, ``inf`` on miss)."""
    p, v = camera.rays()
    p_r, offset, hit = domain.entry_point(p, v)
    n = len(p)
    t = np.where(hit, offset, np.inf)
    depth = np.full(n, np.inf)
    active = np.flatnonzero(hit)
    for _ in range(cfg.max_steps):
        if not active.size:
            break
        x = p[active] + t[active, None] * v[active]
        u, _ = udf_bruteforce(field, x, n_dirs=cfg.udf_dirs, strict=False)
        done = np.isfinite(u) & (u < cfg.hit_eps)
        depth[active[done]] = t[active[done]]
        gone = ~np.isfinite(u)
        t[active] += np.where(np.isfinite(u), cfg.step_scale * u, 0.0)
        outside = ~domain.contains(p[active] + t[active, None] * v[active], tol=1e-9)
        active = active[~(done | gone | outside)]
    return depth


def bench_queries(field: Field, camera: Camera, domain: Domain, cfg: SphereTraceConfig = SphereTraceConfig()) -> dict:
    """Field queries for a depth render both ways, plus how often the two depth maps agree."""
    ddf = CountingField(field)
    r = render_geometry(ddf, camera, "depth", domain)
    st = CountingField(field)
    d_st = sphere_trace_depth(st, camera, domain, cfg)
    d_ddf = r.image.ravel()
    both = np.isfinite(d_ddf) & np.isfinite(d_st)
    agree = float(np.mean(np.abs(d_ddf[both] - d_st[both]) <= 10 * cfg.hit_eps)) if np.any(both) else 1.0
    return {
        "pixels": camera.width * camera.height,
        "ddf_queries": int(r.queries),
        "sphere_trace_queries": int(st.count),
        "ratio": float(st.count / max(r.queries, 1)),
        "udf_dirs": cfg.udf_dirs,
        "hit_pixels_ddf": int(np.isfinite(d_ddf).sum()),
        "hit_pixels_sphere_trace": int(np.isfinite(d_st).sum()),
        "depth_agreement": agree,
    }
