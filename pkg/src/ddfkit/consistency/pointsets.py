"""Sampled estimates of the fundamental point sets and of the directly lit points."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from ..field.base import Field
from ..geometry.domain import Domain
from ..geometry.induced import InducedField
from ..geometry.vecmath import as_points, random_directions
from .checks import Tolerances, estimate_flips, sample_visible_rays, zero_membership


class PointSetKind(str, Enum):
    Q_d = "Q_d"
    Q_xi = "Q_xi"
    Q_d_xi = "Q_d_xi"
    DLP = "DLP"


@dataclass
class PointSetEstimate:
    points: np.ndarray
    kind: PointSetKind

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)

    def __len__(self) -> int:
        return len(self.points)


def estimate_point_sets(field: Field, dom: Domain, n_rays: int, rng: np.random.Generator | None = None,
                        tol: Tolerances = Tolerances(), membership_dirs: int = 8) -> dict[str, PointSetEstimate]:
    """``Q_d`` from hit points of visible rays that pass the zero test, ``Q_xi`` from bisected
    flips, ``Q_d_xi`` as the ``Q_d`` points with at least one locally visible probe direction.

    The probe directions for the membership tests are the originating ray direction plus
    ``membership_dirs`` random ones.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    p, v, d = sample_visible_rays(field, dom, n_rays, rng)
    q = p + d[:, None] * v
    if len(q):
        dirs = np.concatenate([v[:, None, :], random_directions(rng, len(q) * membership_dirs).reshape(len(q), membership_dirs, 3)], axis=1)
        in_qd = zero_membership(field, q, dirs, tol.s_offsets, tol.zero_thresh, need_visible=False)
        in_qdxi = in_qd & zero_membership(field, q, dirs, tol.s_offsets, tol.zero_thresh, need_visible=True)
    else:
        in_qd = in_qdxi = np.zeros(0, dtype=bool)
    flips = estimate_flips(field, dom, n_rays, rng, tol)
    return {
        "Q_d": PointSetEstimate(q[in_qd], PointSetKind.Q_d),
        "Q_xi": PointSetEstimate(flips, PointSetKind.Q_xi),
        "Q_d_xi": PointSetEstimate(q[in_qdxi], PointSetKind.Q_d_xi),
    }


def directly_lit_points(mesh: InducedField | Field, dom: Domain, n_boundary_rays: int, rng: np.random.Generator | None = None) -> PointSetEstimate:
    """First hits of rays cast from uniform boundary positions over inward directions."""
    rng = np.random.default_rng(0) if rng is None else rng
    p, inward = dom.sample_boundary(rng, n_boundary_rays)
    v = random_directions(rng, n_boundary_rays)
    v = np.where((np.sum(v * inward, axis=1) < 0)[:, None], -v, v)
    if isinstance(mesh, InducedField):
        r = mesh.query(p, v)
        vis, d = r.visible, r.d
    else:
        s = mesh.query(p, v)
        vis, d = s.xi > 0.5, s.depth
    ok = vis & np.isfinite(d)
    return PointSetEstimate(p[ok] + d[ok, None] * v[ok], PointSetKind.DLP)


def one_sided_distance(a, b) -> float:
    """``max_{x in a} min_{y in b} |x - y|``; ``inf`` when ``b`` is empty and ``a`` is not."""
    a, b = as_points(a), as_points(b)
    if not len(a):
        return 0.0
    if not len(b):
        return float("inf")
    dist, _ = cKDTree(b).query(a)
    return float(dist.max())


def hausdorff(a, b) -> float:
    """Symmetric sampled Hausdorff distance."""
    return max(one_sided_distance(a, b), one_sided_distance(b, a))


def nesting_fractions(field: Field, sets: dict[str, PointSetEstimate], tol: Tolerances = Tolerances(), n_dirs: int = 16,
                      rng: np.random.Generator | None = None) -> dict[str, float]:
    """Fraction of ``Q_xi`` points that pass the ``Q_d_xi`` membership test, and of ``Q_d_xi``
    points that pass the ``Q_d`` test, within ``io_radius``: the set nesting as containment.

    A flip point is a membership candidate if some probe direction (the ray it came from
    is unknown here, so ``n_dirs`` random ones plus the axes) passes, or if it lies within
    ``io_radius`` of a sampled ``Q_d_xi`` point.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    axes = np.concatenate([np.eye(3), -np.eye(3)])

    def frac(points: np.ndarray, target: np.ndarray, need_visible: bool) -> float:
        if not len(points):
            return 1.0
        dirs = np.concatenate([np.broadcast_to(axes, (len(points), 6, 3)),
                               random_directions(rng, len(points) * n_dirs).reshape(len(points), n_dirs, 3)], axis=1)
        ok = zero_membership(field, points, dirs, tol.s_offsets, tol.zero_thresh + tol.io_radius, need_visible)
        if len(target):
            near, _ = cKDTree(target).query(points)
            ok |= near <= tol.io_radius
        return float(np.mean(ok))

    return {
        "Q_xi_in_Q_d_xi": frac(sets["Q_xi"].points, sets["Q_d_xi"].points, True),
        "Q_d_xi_in_Q_d": frac(sets["Q_d_xi"].points, sets["Q_d"].points, False),
    }
