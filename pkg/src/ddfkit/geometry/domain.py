"""Axis-aligned bounding domain and its epsilon-shrunk interior."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .vecmath import as_points


def ray_box(p: np.ndarray, v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Slab test. Returns ``(t_near, t_far)`` of the infinite line; a miss has ``t_near > t_far``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / v
        t0 = (lo - p) * inv
        t1 = (hi - p) * inv
    tmin = np.fmin(t0, t1)
    tmax = np.fmax(t0, t1)
    # a zero direction component with p inside the slab gives nan from 0*inf; fmax/fmin skip it
    parallel_outside = (v == 0.0) & ((p < lo) | (p > hi))
    tmin = np.where(parallel_outside, np.inf, tmin)
    tmax = np.where(parallel_outside, -np.inf, tmax)
    t_near = np.nanmax(np.where(np.isnan(tmin), -np.inf, tmin), axis=-1)
    t_far = np.nanmin(np.where(np.isnan(tmax), np.inf, tmax), axis=-1)
    return t_near, t_far


@dataclass(frozen=True)
class Domain:
    """The box ``B`` with margin ``epsilon`` defining the inner box ``B_eps``."""

    min_corner: np.ndarray = field(default_factory=lambda: np.full(3, -1.0))
    max_corner: np.ndarray = field(default_factory=lambda: np.full(3, 1.0))
    epsilon: float = 0.05

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=np.float64).reshape(3)
        hi = np.asarray(self.max_corner, dtype=np.float64).reshape(3)
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)
        if not np.all(lo < hi):
            raise ValueError("domain min_corner must be < max_corner componentwise")
        if not (0.0 < self.epsilon < 0.5 * float(np.min(hi - lo))):
            raise ValueError("epsilon must be positive and below half the shortest axis")

    @property
    def extent(self) -> np.ndarray:
        return self.max_corner - self.min_corner

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min_corner + self.max_corner)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.extent))

    @property
    def inner_min(self) -> np.ndarray:
        return self.min_corner + self.epsilon

    @property
    def inner_max(self) -> np.ndarray:
        return self.max_corner - self.epsilon

    def contains(self, p, tol: float = 0.0) -> np.ndarray:
        p = as_points(p)
        return np.all((p >= self.min_corner - tol) & (p <= self.max_corner + tol), axis=-1)

    def in_inner(self, p) -> np.ndarray:
        """Membership in ``B_eps`` (points at distance >= epsilon from the boundary)."""
        p = as_points(p)
        return np.all((p >= self.inner_min) & (p <= self.inner_max), axis=-1)

    def in_shell(self, p) -> np.ndarray:
        return self.contains(p) & ~self.in_inner(p)

    def intersect(self, p, v) -> tuple[np.ndarray, np.ndarray]:
        return ray_box(as_points(p), as_points(v), self.min_corner, self.max_corner)

    def exit_distance(self, p, v) -> np.ndarray:
        """Distance along ``v`` from a point inside ``B`` to the boundary."""
        _, t_far = self.intersect(p, v)
        return np.maximum(t_far, 0.0)

    def entry_point(self, p, v) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """First boundary intersection for rays starting outside ``B``.

        Returns ``(p_r, offset, hit)``. Points already inside are returned unchanged with
        offset 0; rays that miss the box have ``hit == False`` (the caller treats them as
        invisible).
        """
        p = as_points(p)
        v = as_points(v)
        t_near, t_far = self.intersect(p, v)
        inside = self.contains(p)
        hit = inside | ((t_near <= t_far) & (t_far >= 0.0))
        offset = np.where(inside, 0.0, np.maximum(t_near, 0.0))
        offset = np.where(hit, offset, np.inf)
        p_r = np.where(hit[:, None], p + np.where(hit, offset, 0.0)[:, None] * v, np.nan)
        if np.any(hit & ~inside):
            # snap onto the boundary face to remove round-off drift
            p_r[hit & ~inside] = np.clip(p_r[hit & ~inside], self.min_corner, self.max_corner)
        return p_r, offset, hit

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.min_corner + rng.random((n, 3)) * self.extent

    def sample_boundary(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Area-uniform points on the box surface and the inward normal of their face."""
        e = self.extent
        face_areas = np.array([e[1] * e[2], e[0] * e[2], e[0] * e[1]] * 2)
        faces = rng.choice(6, size=n, p=face_areas / face_areas.sum())
        p = self.sample_uniform(rng, n)
        axis = faces % 3
        upper = faces >= 3
        rows = np.arange(n)
        p[rows, axis] = np.where(upper, self.max_corner[axis], self.min_corner[axis])
        inward = np.zeros((n, 3))
        inward[rows, axis] = np.where(upper, -1.0, 1.0)
        return p, inward

    def sample_shell(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform points in the outer shell ``B \\ B_eps`` by rejection."""
        out = []
        have = 0
        while have < n:
            cand = self.sample_uniform(rng, max(2 * (n - have), 64))
            cand = cand[~self.in_inner(cand)]
            out.append(cand)
            have += len(cand)
        return np.concatenate(out)[:n]
