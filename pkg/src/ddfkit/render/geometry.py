"""Geometry buffers rendered by casting one field query per pixel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field.base import CountingField, Field
from ..field.derivatives import FdConfig, differential_report
from ..geometry.domain import Domain
from .camera import Camera
from .raycast import cast_rays, hit_normals

QUANTITIES = ("depth", "visibility", "normals", "gaussian_curv", "mean_curv", "weight_w1")


@dataclass
class GeometryRender:
    image: np.ndarray  # (H, W) or (H, W, 3)
    queries: int  # field queries issued, one per row of every batch
    visible: np.ndarray  # (H, W) bool


def render_geometry(field: Field, camera: Camera, quantity: str = "depth", domain: Domain | None = None,
                    cfg: FdConfig = FdConfig()) -> GeometryRender:
    """Render a per-pixel quantity.

    Depth and visibility cost exactly ``W x H`` queries. Normals and curvatures add
    finite-difference probes on visible pixels. Invisible pixels hold sentinels: ``+inf``
    depth, zero normals, ``nan`` curvature and zero weight.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    counted = field if isinstance(field, CountingField) else CountingField(field)
    start = counted.count
    p, v = camera.rays()
    hits = cast_rays(counted, p, v, domain)
    vis = hits.visible
    shape = (camera.height, camera.width)
    if quantity == "depth":
        img = hits.depth.reshape(shape)
    elif quantity == "visibility":
        xi = hits.sample.xi
        if domain is not None:
            _, _, in_box = domain.entry_point(p, v)
            xi = np.where(in_box, xi, 0.0)
        img = xi.reshape(shape)
    elif quantity == "weight_w1":
        img = np.where(vis, hits.sample.weights[:, 0], 0.0).reshape(shape)
    elif quantity == "normals":
        n = np.zeros((len(p), 3))
        if np.any(vis):
            nv = hit_normals(counted, hits.p_query[vis], v[vis], hits.local_depth[vis], cfg)
            n[vis] = np.nan_to_num(nv)
        img = n.reshape(shape + (3,))
    else:
        out = np.full(len(p), np.nan)
        if np.any(vis):
            rep = differential_report(counted, hits.p_query[vis], v[vis], cfg, strict=False)
            out[vis] = rep.gaussian_curv if quantity == "gaussian_curv" else rep.mean_curv
        img = out.reshape(shape)
    return GeometryRender(img, counted.count - start, vis.reshape(shape))


def depth_preview(depth: np.ndarray) -> np.ndarray:
    """Grey preview in ``[0, 1]``: depth runs from dark to light and misses are white."""
    d = np.asarray(depth, dtype=np.float64)
    finite = np.isfinite(d)
    out = np.ones_like(d)
    if np.any(finite):
        lo, hi = d[finite].min(), d[finite].max()
        out[finite] = 0.85 * (d[finite] - lo) / (hi - lo) if hi > lo else 0.0
    return out


def preview(image: np.ndarray, quantity: str) -> np.ndarray:
    """Map a geometry buffer to displayable values in ``[0, 1]``."""
    if quantity == "depth":
        return depth_preview(image)
    if quantity == "normals":
        return np.where(np.any(image != 0, axis=-1, keepdims=True), 0.5 * (image + 1.0), 1.0)
    img = np.nan_to_num(np.asarray(image, dtype=np.float64), nan=0.0, posinf=0.0, neginf=0.0)
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo) if hi > lo else np.zeros_like(img)
