"""Closed-form ray intersection for analytic primitives.

Each ``intersect`` returns ``(t, normal)`` with ``t = inf`` on a miss. Normals are the
geometric outward normals; sign fixing against the view direction happens in
:mod:`ddfkit.geometry.induced`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bvh import T_MIN
from .domain import ray_box
from .vecmath import dot

TANGENT_TOL = 1e-12


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64).reshape(3))
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    def intersect(self, p: np.ndarray, v: np.ndarray, t_min: float = T_MIN):
        oc = p - self.center
        b = dot(oc, v)
        c = dot(oc, oc) - self.radius**2
        disc = b * b - c
        # a tangent ray (discriminant within tolerance of zero) counts as a hit
        disc = np.where((disc < 0) & (disc > -TANGENT_TOL), 0.0, disc)
        root = np.sqrt(np.where(disc >= 0, disc, 0.0))
        t0 = -b - root
        t1 = -b + root
        t = np.where(t0 >= t_min, t0, np.where(t1 >= t_min, t1, np.inf))
        t = np.where(disc >= 0, t, np.inf)
        q = p + np.where(np.isfinite(t), t, 0.0)[:, None] * v
        n = (q - self.center) / self.radius
        return t, n

    def surface_distance(self, x: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(x - self.center, axis=-1) - self.radius)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius


@dataclass(frozen=True)
class Plane:
    point: np.ndarray = field(default_factory=lambda: np.zeros(3))
    normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64).reshape(3)
        object.__setattr__(self, "point", np.asarray(self.point, dtype=np.float64).reshape(3))
        object.__setattr__(self, "normal", n / np.linalg.norm(n))

    def intersect(self, p: np.ndarray, v: np.ndarray, t_min: float = T_MIN):
        denom = v @ self.normal
        num = (self.point - p) @ self.normal
        with np.errstate(divide="ignore", invalid="ignore"):
            t = num / denom
        t = np.where((denom != 0) & (t >= t_min), t, np.inf)
        return t, np.broadcast_to(self.normal, p.shape).copy()

    def surface_distance(self, x: np.ndarray) -> np.ndarray:
        return np.abs((x - self.point) @ self.normal)

    def bounds(self):
        return np.full(3, -np.inf), np.full(3, np.inf)


@dataclass(frozen=True)
class Box:
    min_corner: np.ndarray = field(default_factory=lambda: np.full(3, -0.5))
    max_corner: np.ndarray = field(default_factory=lambda: np.full(3, 0.5))

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=np.float64).reshape(3)
        hi = np.asarray(self.max_corner, dtype=np.float64).reshape(3)
        if not np.all(lo < hi):
            raise ValueError("box min_corner must be < max_corner")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def intersect(self, p: np.ndarray, v: np.ndarray, t_min: float = T_MIN):
        lo, hi = self.min_corner, self.max_corner
        t_near, t_far = ray_box(p, v, lo, hi)
        hit = t_near <= t_far
        t = np.where(hit & (t_near >= t_min), t_near, np.where(hit & (t_far >= t_min), t_far, np.inf))
        q = p + np.where(np.isfinite(t), t, 0.0)[:, None] * v
        # the face is the axis where the hit point sits on a slab plane (closest one)
        d_lo = np.abs(q - lo)
        d_hi = np.abs(q - hi)
        dist = np.minimum(d_lo, d_hi)
        axis = np.argmin(dist, axis=1)
        rows = np.arange(len(p))
        n = np.zeros_like(p)
        n[rows, axis] = np.where(d_hi[rows, axis] < d_lo[rows, axis], 1.0, -1.0)
        return t, n

    def surface_distance(self, x: np.ndarray) -> np.ndarray:
        c = 0.5 * (self.min_corner + self.max_corner)
        h = 0.5 * (self.max_corner - self.min_corner)
        q = np.abs(x - c) - h
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(q.max(axis=-1), 0.0)
        return np.abs(outside + inside)

    def bounds(self):
        return self.min_corner, self.max_corner


AnalyticShape = Sphere | Plane | Box
