"""Shape-induced visibility/depth oracle: exact first-hit ray casting against a shape."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bvh import T_MIN, Bvh
from .domain import Domain
from .mesh import TriangleMesh
from .shapes import Box, Plane, Sphere
from .vecmath import as_points, dot

GRAZING_TOL = 1e-6


@dataclass
class InducedQuery:
    """Batched result of :meth:`InducedField.query`.

    ``d`` is ``+inf`` where ``xi == 0``. ``normal`` is sign-fixed so that ``n . v < 0``
    (zeros on misses); ``reliable`` is False on misses and grazing hits.
    """

    xi: np.ndarray
    d: np.ndarray
    normal: np.ndarray
    reliable: np.ndarray
    part: np.ndarray

    @property
    def visible(self) -> np.ndarray:
        return self.xi > 0.5


class InducedField:
    """A shape ``S`` (union of meshes and analytic primitives) and its induced ``(xi, d)``.

    Meshes are wrapped in a :class:`Bvh` at construction. Queries are pure and may be
    issued concurrently.
    """

    def __init__(self, parts: Sequence[TriangleMesh | Sphere | Plane | Box], domain: Domain | None = None, t_min: float = T_MIN):
        if isinstance(parts, (TriangleMesh, Sphere, Plane, Box)):
            parts = [parts]
        if not parts:
            raise ValueError("an induced field needs at least one shape")
        self.parts = list(parts)
        self.domain = domain
        self.t_min = t_min
        self._bvh = {i: Bvh(s) for i, s in enumerate(self.parts) if isinstance(s, TriangleMesh)}

    def bvh(self, index: int = 0) -> Bvh:
        return self._bvh[index]

    def query(self, p, v) -> InducedQuery:
        p = as_points(p)
        v = as_points(v)
        n_rays = len(p)
        best_t = np.full(n_rays, np.inf)
        best_n = np.zeros((n_rays, 3))
        best_part = np.full(n_rays, -1, dtype=np.int64)
        for i, shape in enumerate(self.parts):
            if i in self._bvh:
                hits = self._bvh[i].intersect(p, v, self.t_min)
                t = hits.t
                n = np.zeros((n_rays, 3))
                n[hits.hit] = shape.face_normals[hits.face[hits.hit]]
            else:
                t, n = shape.intersect(p, v, self.t_min)
            closer = t < best_t
            best_t[closer] = t[closer]
            best_n[closer] = n[closer]
            best_part[closer] = i
        hit = np.isfinite(best_t)
        cos = dot(best_n, v)
        best_n = np.where((cos > 0)[:, None], -best_n, best_n)
        reliable = hit & (np.abs(cos) >= GRAZING_TOL)
        return InducedQuery(hit.astype(np.float64), best_t, best_n, reliable, best_part)

    def surface_points(self, p, v) -> tuple[np.ndarray, np.ndarray]:
        """``q = p + d v`` for visible rays (nan elsewhere) and the visibility mask."""
        res = self.query(p, v)
        vis = res.visible
        q = np.full((len(res.d), 3), np.nan)
        q[vis] = as_points(p)[vis] + res.d[vis, None] * as_points(v)[vis]
        return q, vis

    def sample_surface(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Area-weighted surface samples across all mesh parts (analytic parts are sampled
        through their closed form: spheres exactly, boxes per face)."""
        areas = np.array([_area(s) for s in self.parts])
        if not np.all(np.isfinite(areas)) or areas.sum() <= 0:
            raise ValueError("surface sampling needs finite, positive total area")
        which = rng.choice(len(self.parts), size=n, p=areas / areas.sum())
        pts = np.empty((n, 3))
        nrm = np.empty((n, 3))
        for i, shape in enumerate(self.parts):
            sel = np.flatnonzero(which == i)
            if not len(sel):
                continue
            pts[sel], nrm[sel] = _sample_shape(shape, rng, len(sel))
        return pts, nrm


def _area(shape) -> float:
    if isinstance(shape, TriangleMesh):
        return shape.total_area
    if isinstance(shape, Sphere):
        return 4.0 * np.pi * shape.radius**2
    if isinstance(shape, Box):
        e = shape.max_corner - shape.min_corner
        return 2.0 * float(e[0] * e[1] + e[1] * e[2] + e[0] * e[2])
    return np.inf


def _sample_shape(shape, rng: np.random.Generator, n: int):
    if isinstance(shape, TriangleMesh):
        pts, nrm, _ = shape.sample_surface(rng, n)
        return pts, nrm
    if isinstance(shape, Sphere):
        from .vecmath import random_directions

        d = random_directions(rng, n)
        return shape.center + shape.radius * d, d
    if isinstance(shape, Box):
        dom = Domain(shape.min_corner, shape.max_corner, epsilon=1e-9)
        pts, inward = dom.sample_boundary(rng, n)
        return pts, -inward
    raise ValueError(f"cannot sample the surface of {type(shape).__name__}")
