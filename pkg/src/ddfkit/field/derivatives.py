"""Finite-difference differential geometry of a field.

All operators are batched over rows of ``(p, v)``. Rows whose probes are invisible or
switch the argmax component relative to the centre probe cannot be differentiated; with
``strict=True`` they raise :class:`DiscontinuityStraddled`, otherwise they come back as
``nan``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.vecmath import as_points, dot, normalize, seed_from_array
from .base import Field, FieldSample

_EYE = np.eye(3)


@dataclass(frozen=True)
class FdConfig:
    h_p: float = 1e-4
    h_v: float = 1e-4

    def __post_init__(self):
        if not (self.h_p > 0 and self.h_v > 0):
            raise ValueError("finite-difference steps must be positive")


class DiscontinuityStraddled(ValueError):
    def __init__(self, rows: np.ndarray):
        self.rows = np.asarray(rows)
        super().__init__(f"{len(self.rows)} probe set(s) straddle a visibility or component discontinuity")


class DegenerateNormal(ValueError):
    def __init__(self, rows: np.ndarray):
        self.rows = np.asarray(rows)
        super().__init__(f"{len(self.rows)} gradient(s) too small to define a normal")


def _query_stacked(field: Field, ps: list[np.ndarray], vs: list[np.ndarray]) -> list[FieldSample]:
    n = len(ps[0])
    s = field.query(np.concatenate(ps), np.concatenate(vs))
    return [s.take(slice(k * n, (k + 1) * n)) for k in range(len(ps))]


def _probe_values(centre: FieldSample, probes: list[FieldSample], component: int | None):
    """Depth values of each probe and the per-row validity mask."""
    if component is None:
        valid = centre.visible.copy()
        ref = centre.i_star
        vals = []
        for s in probes:
            valid &= s.visible & (s.i_star == ref)
            vals.append(s.depth)
    else:
        valid = np.isfinite(centre.depths[:, component])
        vals = []
        for s in probes:
            valid &= np.isfinite(s.depths[:, component])
            vals.append(s.depths[:, component])
    vals = np.stack(vals)
    valid &= np.all(np.isfinite(vals), axis=0)
    return vals, valid


def _central(vals: np.ndarray, h: float) -> np.ndarray:
    """Central differences from probes stored as ``(+e_0, -e_0, +e_1, ...)``."""
    with np.errstate(invalid="ignore"):
        return np.stack([(vals[2 * k] - vals[2 * k + 1]) / (2.0 * h) for k in range(3)], axis=1)


def _finish(values: np.ndarray, valid: np.ndarray, strict: bool) -> np.ndarray:
    if strict and not np.all(valid):
        raise DiscontinuityStraddled(np.flatnonzero(~valid))
    out = np.array(values, dtype=np.float64)
    out[~valid] = np.nan
    return out


def grad_p(field: Field, p, v, cfg: FdConfig = FdConfig(), component: int | None = None, strict: bool = True) -> np.ndarray:
    """Central-difference ``grad_p d`` along the coordinate axes, shape ``(N, 3)``.

    ``component=None`` differentiates the argmax depth ``d_{i*}``; an integer selects one
    delta component.
    """
    p, v = as_points(p), as_points(v)
    h = cfg.h_p
    ps = [p] + [p + s * h * _EYE[k] for k in range(3) for s in (1.0, -1.0)]
    samples = _query_stacked(field, ps, [v] * 7)
    vals, valid = _probe_values(samples[0], samples[1:], component)
    return _finish(_central(vals, h), valid, strict)


def grad_p_scalar(field: Field, p, v, cfg: FdConfig, which: str) -> np.ndarray:
    """Central-difference gradient of ``xi`` or of ``w_1`` in ``p`` (no validity masking)."""
    p, v = as_points(p), as_points(v)
    h = cfg.h_p
    ps = [p + s * h * _EYE[k] for k in range(3) for s in (1.0, -1.0)]
    samples = _query_stacked(field, ps, [v] * 6)
    pick = (lambda s: s.xi) if which == "xi" else (lambda s: s.weights[:, 0])
    return _central(np.stack([pick(s) for s in samples]), h)


def grad_v(field: Field, p, v, cfg: FdConfig = FdConfig(), strict: bool = True) -> np.ndarray:
    """Central-difference ``grad_v d`` with the direction renormalised at every probe."""
    p, v = as_points(p), as_points(v)
    h = cfg.h_v
    vs = [v] + [normalize(v + s * h * _EYE[k]) for k in range(3) for s in (1.0, -1.0)]
    samples = _query_stacked(field, [p] * 7, vs)
    vals, valid = _probe_values(samples[0], samples[1:], None)
    return _finish(_central(vals, h), valid, strict)


def hessian_p(field: Field, p, v, cfg: FdConfig = FdConfig(), strict: bool = True) -> np.ndarray:
    """Central-difference Hessian of the argmax depth in ``p``, shape ``(N, 3, 3)``."""
    p, v = as_points(p), as_points(v)
    h = cfg.h_p
    ps = [p]
    for k in range(3):
        ps += [p + h * _EYE[k], p - h * _EYE[k]]
    pairs = [(i, j) for i in range(3) for j in range(i + 1, 3)]
    for i, j in pairs:
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            ps.append(p + h * (si * _EYE[i] + sj * _EYE[j]))
    samples = _query_stacked(field, ps, [v] * len(ps))
    vals, valid = _probe_values(samples[0], samples[1:], None)
    d0 = samples[0].depth
    H = np.empty((len(p), 3, 3))
    with np.errstate(invalid="ignore"):
        for k in range(3):
            H[:, k, k] = (vals[2 * k] - 2.0 * d0 + vals[2 * k + 1]) / (h * h)
        for m, (i, j) in enumerate(pairs):
            pp, pm, mp, mm = vals[6 + 4 * m : 10 + 4 * m]
            H[:, i, j] = H[:, j, i] = (pp - pm - mp + mm) / (4.0 * h * h)
    if strict and not np.all(valid):
        raise DiscontinuityStraddled(np.flatnonzero(~valid))
    H[~valid] = np.nan
    return H


def normal_from_gradient(grad, v, strict: bool = True) -> np.ndarray:
    """Unit normal parallel to ``grad`` with the sign chosen so that ``n . v < 0``."""
    grad, v = as_points(grad), as_points(v)
    length = np.linalg.norm(grad, axis=1)
    ok = np.isfinite(length) & (length > 1e-9)
    if strict and not np.all(ok):
        raise DegenerateNormal(np.flatnonzero(~ok))
    n = np.full_like(grad, np.nan)
    n[ok] = grad[ok] / length[ok, None]
    flip = ok & (dot(n, v) > 0)
    n[flip] = -n[flip]
    return n


def field_normals(field: Field, p, v, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """Field-derived normals; ``nan`` rows where they are undefined."""
    g = grad_p(field, p, v, cfg, strict=False)
    return normal_from_gradient(g, v, strict=False)


def eikonal_residual(field: Field, p, v, cfg: FdConfig = FdConfig(), strict: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """``grad_p d . v + 1`` (ideally 0) and ``||grad_p d||`` (ideally >= 1)."""
    v = as_points(v)
    g = grad_p(field, p, v, cfg, strict=strict)
    return dot(g, v) + 1.0, np.linalg.norm(g, axis=1)


def visibility_residual(field: Field, p, v, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """Directional derivative of ``xi`` along ``v`` by central differences."""
    p, v = as_points(p), as_points(v)
    h = cfg.h_p
    fwd, bwd = _query_stacked(field, [p + h * v, p - h * v], [v, v])
    return (fwd.xi - bwd.xi) / (2.0 * h)


def grad_consistency_residual(field: Field, p, v, cfg: FdConfig = FdConfig(), strict: bool = True) -> np.ndarray:
    """``grad_v d - d (grad_p d)(I - v v^T)``, shape ``(N, 3)``."""
    p, v = as_points(p), as_points(v)
    gp = grad_p(field, p, v, cfg, strict=strict)
    gv = grad_v(field, p, v, cfg, strict=strict)
    d = field.query(p, v).depth
    projected = gp - dot(gp, v)[:, None] * v
    return gv - d[:, None] * projected


@dataclass
class DifferentialReport:
    grad_p: np.ndarray  # (N, 3)
    grad_v: np.ndarray  # (N, 3)
    hessian_p: np.ndarray  # (N, 3, 3)
    normal: np.ndarray  # (N, 3)
    t_x: np.ndarray
    t_y: np.ndarray
    second_form: np.ndarray  # (N, 2, 2)
    metric_raw: np.ndarray  # (N, 2, 2) diagnostic; the curvatures use g = I
    gaussian_curv: np.ndarray
    mean_curv: np.ndarray


def tangent_basis(p: np.ndarray, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt of two Gaussian draws against ``n``, seeded by each position."""
    p, n = as_points(p), as_points(n)
    tx = np.empty_like(n)
    ty = np.empty_like(n)
    for k in range(len(p)):
        rng = np.random.default_rng(seed_from_array(p[k]))
        a, b = rng.standard_normal((2, 3))
        a = a - (a @ n[k]) * n[k]
        a /= np.linalg.norm(a)
        b = b - (b @ n[k]) * n[k] - (b @ a) * a
        b /= np.linalg.norm(b)
        tx[k], ty[k] = a, b
    return tx, ty


def differential_report(field: Field, p, v, cfg: FdConfig = FdConfig(), strict: bool = True) -> DifferentialReport:
    """Normals, tangent frame, second fundamental form and curvatures at ``q(p, v)``.

    ``II_ij = (t_j^T H t_i)(n^T v)`` with ``H`` the positional Hessian of the depth; the
    metric is taken as the identity, so ``K = det II`` and ``H_mean = tr II``.
    """
    p, v = as_points(p), as_points(v)
    gp = grad_p(field, p, v, cfg, strict=strict)
    gv = grad_v(field, p, v, cfg, strict=strict)
    H = hessian_p(field, p, v, cfg, strict=strict)
    n = normal_from_gradient(gp, v, strict=strict)
    ok = np.all(np.isfinite(n), axis=1) & np.all(np.isfinite(H), axis=(1, 2))
    tx = np.full_like(p, np.nan)
    ty = np.full_like(p, np.nan)
    if np.any(ok):
        tx[ok], ty[ok] = tangent_basis(p[ok], n[ok])
    T = np.stack([tx, ty], axis=1)  # (N, 2, 3)
    nv = dot(n, v)
    II = np.einsum("nja,nab,nib->nij", T, H, T) * nv[:, None, None]
    II = 0.5 * (II + np.swapaxes(II, 1, 2))
    c = np.einsum("na,nia->ni", gp, T)
    vt = np.einsum("na,nia->ni", v, T)
    g_raw = np.eye(2)[None] + c[:, :, None] * c[:, None, :] + c[:, :, None] * vt[:, None, :] + c[:, None, :] * vt[:, :, None]
    K = np.linalg.det(II)
    Hm = np.trace(II, axis1=1, axis2=2)
    return DifferentialReport(gp, gv, H, n, tx, ty, II, g_raw, K, Hm)
