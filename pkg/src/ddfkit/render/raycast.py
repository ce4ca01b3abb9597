"""One-query ray casting through a field, with optional entry into the field's domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field.base import Field, FieldSample
from ..field.derivatives import FdConfig, grad_p, normal_from_gradient
from ..geometry.domain import Domain
from ..geometry.vecmath import as_points


@dataclass
class RayHits:
    visible: np.ndarray  # (N,) bool
    depth: np.ndarray  # (N,) distance from the ray origin, +inf where not visible
    p_query: np.ndarray  # (N, 3) where the field was queried
    sample: FieldSample

    @property
    def local_depth(self) -> np.ndarray:
        """Depth measured from ``p_query`` (the field's own output)."""
        return np.where(self.visible, self.sample.depth, np.inf)

    def hit_points(self, p, v) -> np.ndarray:
        """``p + depth v`` on visible rows, ``nan`` elsewhere."""
        p, v = as_points(p), as_points(v)
        out = np.full_like(p, np.nan)
        out[self.visible] = p[self.visible] + self.depth[self.visible, None] * v[self.visible]
        return out


def cast_rays(field: Field, p, v, domain: Domain | None = None) -> RayHits:
    """Exactly one field query per ray.

    With a domain, rays starting outside it are moved to their entry point and the
    offset is added to the depth; rays that miss the domain are still queried (at their
    origin) so the query count stays one per ray, but they are reported invisible.
    """
    p, v = as_points(p), as_points(v)
    if domain is None:
        pq = p
        offset = np.zeros(len(p))
        hit = np.ones(len(p), dtype=bool)
    else:
        p_r, offset, hit = domain.entry_point(p, v)
        pq = np.where(hit[:, None], p_r, p)
        offset = np.where(hit, offset, 0.0)
    s = field.query(pq, v)
    vis = hit & (s.xi >= 0.5) & np.isfinite(s.depth)
    depth = np.where(vis, offset + s.depth, np.inf)
    return RayHits(vis, depth, pq, s)


def hit_normals(field: Field, p_query, v, local_depth, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """Unit normals at the hits, facing the ray; ``nan`` rows where the gradient degenerates.

    The depth gradient is the same at every point of a ray before its hit, so it is taken
    halfway along the ray, which keeps the probes away from the surface the ray starts on.
    """
    p_query, v = as_points(p_query), as_points(v)
    mid = p_query + 0.5 * np.asarray(local_depth)[:, None] * v
    g = grad_p(field, mid, v, cfg, strict=False)
    return normal_from_gradient(g, v, strict=False)
