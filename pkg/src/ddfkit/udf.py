"""Unsigned distance and minimal-direction extraction from a field.

``udf_bruteforce`` scans a dense Fibonacci direction set and serves as the oracle.
``mdf_optimize`` refines ``K_c`` candidate directions per point by projected descent on
the sphere and blends them with composition-style softmax weights.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .compose import EPSILON_S, ETA_T, blend_weights
from .field.base import Field
from .field.derivatives import FdConfig, field_normals
from .geometry.vecmath import as_points, dot, fibonacci_sphere, normalize, orthonormal_basis


class NoSurfaceVisible(ValueError):
    def __init__(self, rows: np.ndarray):
        self.rows = np.asarray(rows)
        super().__init__(f"no visible direction from {len(self.rows)} point(s)")


@dataclass(frozen=True)
class UdfConfig:
    K_c: int = 5
    tau_n: float = 5e-3
    tau_d: float = 0.1
    iters: int = 200
    step: float = 0.05  # initial angular step (radians)
    fd_step: float = 1e-5  # tangent-plane finite-difference step (radians)
    init_dirs: int = 256
    init_separation_deg: float = 15.0
    oracle_dirs: int = 4096
    eta_T: float = ETA_T
    epsilon_s: float = EPSILON_S
    far: float = 10.0  # stand-in depth for invisible directions
    medial_cone_deg: float = 30.0
    medial_rel: float = 5e-2
    grad_h: float = 1e-4
    refine_iters: int = 60
    normal_fd: FdConfig = FdConfig()

    def __post_init__(self):
        if self.K_c < 2:
            raise ValueError("K_c must be at least 2")
        if self.oracle_dirs < 64:
            raise ValueError("oracle_dirs must be at least 64")
        if self.iters < 0 or self.step <= 0:
            raise ValueError("iters must be >= 0 and step > 0")


@dataclass
class MdfResult:
    v_star: np.ndarray  # (N, 3)
    udf: np.ndarray  # (N,)
    candidates: np.ndarray  # (N, K, 3)
    cand_depth: np.ndarray  # (N, K), +inf where invisible
    cand_xi: np.ndarray  # (N, K)
    weights: np.ndarray  # (N, K)


def _query_dirs(field: Field, p: np.ndarray, dirs: np.ndarray, far: float):
    """Depth (``far`` where invisible) and visibility for ``(N, M, 3)`` directions."""
    n, m = dirs.shape[:2]
    s = field.query(np.repeat(p, m, axis=0), dirs.reshape(-1, 3))
    d = s.depth.reshape(n, m)
    xi = s.xi.reshape(n, m)
    d = np.where((xi > 0.5) & np.isfinite(d), d, far)
    return d, xi


def _depth_scan(field: Field, p: np.ndarray, dirs: np.ndarray, chunk: int = 1 << 20):
    p = as_points(p)
    rows = max(1, chunk // len(dirs))
    d = np.empty((len(p), len(dirs)))
    vis = np.empty((len(p), len(dirs)), dtype=bool)
    for a in range(0, len(p), rows):
        b = min(a + rows, len(p))
        s = field.query(np.repeat(p[a:b], len(dirs), axis=0), np.tile(dirs, (b - a, 1)))
        vis[a:b] = (s.xi > 0.5).reshape(b - a, -1)
        d[a:b] = np.where(vis[a:b], s.depth.reshape(b - a, -1), np.inf)
    return d, vis


def fibonacci_cap(n: int, half_angle: float) -> np.ndarray:
    """Nearly uniform ``n`` directions in the cap of ``half_angle`` radians about +z."""
    i = np.arange(n, dtype=np.float64) + 0.5
    z = 1.0 - (1.0 - np.cos(half_angle)) * i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def udf_bruteforce(field: Field, p, n_dirs: int = 4096, strict: bool = True, refine: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Minimum visible depth over a Fibonacci set of ``n_dirs`` directions, and its direction.

    Ties resolve to the first direction in the set. ``refine > 0`` adds a second scan of
    ``refine`` directions in a cap of twice the set's covering radius around the first
    argmin, which lifts the angular resolution of the returned direction well below the
    spacing of the coarse set.
    """
    p = as_points(p)
    dirs = fibonacci_sphere(n_dirs)
    d, vis = _depth_scan(field, p, dirs)
    none = ~np.any(vis, axis=1)
    if strict and np.any(none):
        raise NoSurfaceVisible(np.flatnonzero(none))
    k = np.argmin(d, axis=1)
    udf = d[np.arange(len(d)), k]
    arg = dirs[k].copy()
    if refine and np.any(~none):
        rows = np.flatnonzero(~none)
        cap = fibonacci_cap(refine, 2.0 * np.sqrt(8.0 * np.pi / (3.0 * np.sqrt(3.0) * n_dirs)))
        axis = arg[rows]
        t1, t2 = orthonormal_basis(axis)
        local = cap[None, :, 0:1] * t1[:, None] + cap[None, :, 1:2] * t2[:, None] + cap[None, :, 2:3] * axis[:, None]
        dl = np.empty((len(rows), refine))
        for a in range(0, len(rows), max(1, (1 << 20) // refine)):
            b = min(a + max(1, (1 << 20) // refine), len(rows))
            s = field.query(np.repeat(p[rows[a:b]], refine, axis=0), local[a:b].reshape(-1, 3))
            dl[a:b] = np.where(s.xi > 0.5, s.depth, np.inf).reshape(b - a, refine)
        j = np.argmin(dl, axis=1)
        better = dl[np.arange(len(rows)), j] < udf[rows]
        udf[rows[better]] = dl[better, j[better]]
        arg[rows[better]] = local[better, j[better]]
    udf[none] = np.nan
    arg[none] = np.nan
    return udf, arg


def medial_flags(field: Field, p, cfg: UdfConfig = UdfConfig()) -> np.ndarray:
    """Points whose nearest surface is ambiguous.

    A point is flagged when some direction outside a cone of ``medial_cone_deg`` around the
    oracle argmin reaches a depth within ``medial_rel`` (relative) of the minimum.
    """
    dirs = fibonacci_sphere(cfg.oracle_dirs)
    d, vis = _depth_scan(field, p, dirs)
    k = np.argmin(d, axis=1)
    best = d[np.arange(len(d)), k]
    cos_cone = np.cos(np.radians(cfg.medial_cone_deg))
    outside = (dirs[k] @ dirs.T) < cos_cone
    rival = np.where(outside, d, np.inf).min(axis=1)
    with np.errstate(invalid="ignore"):
        return ~np.isfinite(best) | ((rival - best) <= cfg.medial_rel * best)


def mdf_weights(cand_xi, cand_depth, eta_T: float = ETA_T, epsilon_s: float = EPSILON_S, far: float = 10.0) -> np.ndarray:
    """Composition-style softmax selection weights over candidates (last axis)."""
    d = np.where(np.isfinite(cand_depth), cand_depth, far)
    return blend_weights(cand_xi, d, eta_T, epsilon_s)


def _initial_candidates(field: Field, p: np.ndarray, cfg: UdfConfig, rng) -> np.ndarray:
    dirs = fibonacci_sphere(cfg.init_dirs)
    if rng is not None:
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        dirs = dirs @ (q * np.sign(np.diag(r)))
    d, _ = _query_dirs(field, p, np.broadcast_to(dirs, (len(p),) + dirs.shape), cfg.far)
    cos_sep = np.cos(np.radians(cfg.init_separation_deg))
    gram = dirs @ dirs.T
    n = len(p)
    rows = np.arange(n)
    score = d.copy()
    taken = np.zeros_like(score, dtype=bool)
    out = np.empty((n, cfg.K_c, 3))
    for i in range(cfg.K_c):
        # prefer the best direction far enough from those already chosen
        k = np.argmin(np.where(taken, np.inf, score), axis=1)
        out[:, i] = dirs[k]
        taken[rows, k] = True
        near = gram[k] > cos_sep
        score = np.where(near & ~taken, score + 2 * cfg.far, score)
    return out


def _partial_loss(d, xi, v, n, others_sum, cfg: UdfConfig):
    K = cfg.K_c
    rep = 4.0 * cfg.tau_n / (K * K - K) * dot(v, others_sum)
    align = np.where(np.isfinite(n[..., 0]), (dot(v, np.nan_to_num(n)) + 1.0) ** 2, 0.0)
    return (d - xi) / K + rep + cfg.tau_d / K * align


def _refine(field: Field, p: np.ndarray, V: np.ndarray, cfg: UdfConfig, iters: int, step0: float) -> np.ndarray:
    """Candidate-wise (Gauss-Seidel) normalised descent with a per-candidate adaptive step.

    Updating one candidate at a time against the current others keeps every accepted move
    a decrease of the full loss; simultaneous moves of coincident candidates would not.
    """
    V = V.copy()
    n, K = V.shape[:2]
    h = cfg.fd_step
    step = np.full((n, K), step0)
    rep_w = 4.0 * cfg.tau_n / (K * K - K)
    for _ in range(iters):
        for i in range(K):
            v = V[:, i]
            t1, t2 = orthonormal_basis(v)
            probes = np.stack([v, normalize(v + h * t1), normalize(v - h * t1), normalize(v + h * t2), normalize(v - h * t2)], axis=1)
            d, xi = _query_dirs(field, p, probes, cfg.far)
            f = d - xi
            normals = field_normals(field, p, v, cfg.normal_fd)
            # depth term by finite differences, the other two analytically with n held fixed
            g = (((f[:, 1] - f[:, 2]) / (2 * h))[:, None] * t1 + ((f[:, 3] - f[:, 4]) / (2 * h))[:, None] * t2) / K
            others = V.sum(axis=1) - v
            nn = np.nan_to_num(normals)
            g = g + rep_w * others + (2.0 * cfg.tau_d / K) * ((dot(v, nn) + 1.0) * np.isfinite(normals[:, 0]))[:, None] * nn
            g = g - dot(g, v)[:, None] * v
            gnorm = np.linalg.norm(g, axis=1)
            moving = (gnorm > 0) & (step[:, i] > 1e-12)
            direction = g / np.where(gnorm > 0, gnorm, 1.0)[:, None]
            trial = normalize(v - step[:, i, None] * direction)
            dt, xt = _query_dirs(field, p, trial[:, None, :], cfg.far)
            old = _partial_loss(d[:, 0], xi[:, 0], v, normals, others, cfg)
            new = _partial_loss(dt[:, 0], xt[:, 0], trial, normals, others, cfg)
            accept = moving & (new < old)
            V[:, i] = np.where(accept[:, None], trial, v)
            step[:, i] = np.where(accept, step[:, i] * 1.2, step[:, i] * 0.5)
        if np.all(step < 1e-12):
            break
    return V


def mdf_optimize(field: Field, p, cfg: UdfConfig = UdfConfig(), rng: np.random.Generator | None = None,
                 init: np.ndarray | None = None, strict: bool = True) -> MdfResult:
    """Per-point multi-start optimisation of the candidate-direction loss.

    ``init`` (``(N, K_c, 3)``) warm-starts the candidates instead of the Fibonacci spread;
    warm starts run ``refine_iters`` iterations from a small step.
    """
    p = as_points(p)
    if init is None:
        V = _initial_candidates(field, p, cfg, rng)
        V = _refine(field, p, V, cfg, cfg.iters, cfg.step)
    else:
        V = _refine(field, p, np.array(init, dtype=np.float64), cfg, cfg.refine_iters, 1e-3)
    d, xi = _query_dirs(field, p, V, cfg.far)
    vis = xi > 0.5
    none = ~np.any(vis, axis=1)
    if strict and np.any(none):
        raise NoSurfaceVisible(np.flatnonzero(none))
    w = mdf_weights(xi, d, cfg.eta_T, cfg.epsilon_s, cfg.far)
    udf = np.sum(w * d, axis=1)
    v_star = normalize(np.einsum("nk,nki->ni", w, V))
    udf[none] = np.nan
    v_star[none] = np.nan
    return MdfResult(v_star, udf, V, np.where(vis, d, np.inf), xi, w)


def udf_gradient(field: Field, p, cfg: UdfConfig = UdfConfig(), result: MdfResult | None = None) -> np.ndarray:
    """Central-difference gradient of the extracted UDF, re-optimising warm-started
    candidates at every probe."""
    p = as_points(p)
    if result is None:
        result = mdf_optimize(field, p, cfg, strict=False)
    h = cfg.grad_h
    eye = np.eye(3)
    probes = np.concatenate([p + s * h * eye[k] for k in range(3) for s in (1.0, -1.0)])
    init = np.tile(result.candidates, (6, 1, 1))
    res = mdf_optimize(field, probes, cfg, init=init, strict=False)
    u = res.udf.reshape(6, len(p))
    return np.stack([(u[2 * k] - u[2 * k + 1]) / (2 * h) for k in range(3)], axis=1)


def with_overrides(cfg: UdfConfig, **kw) -> UdfConfig:
    return replace(cfg, **kw)
