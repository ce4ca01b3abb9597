"""Evaluators for every term of the single-shape fitting objective.

All functions are pure and return per-sample arrays unless noted; gradients of the
predicted field are taken by central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..field.base import Field, FieldSample
from ..field.derivatives import FdConfig, field_normals, grad_p, grad_p_scalar, visibility_residual
from ..geometry.vecmath import as_points, dot
from .sampler import LabeledBatch, SampleType

BCE_CLAMP = 1e-7


@dataclass(frozen=True)
class LossWeights:
    gamma_d: float = 5.0
    gamma_xi: float = 1.0
    gamma_n: float = 10.0
    gamma_V: float = 1.0
    gamma_Ed: float = 0.05
    gamma_Exi: float = 0.01
    gamma_T: float = 0.25
    gamma_Vxi: float = 0.25
    epsilon_T: float = 0.1

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    @classmethod
    def zeros(cls) -> "LossWeights":
        return cls(**{f.name: 0.0 for f in fields(cls) if f.name != "epsilon_T"})


def loss_min_distance(pred: FieldSample, xi_gt, d_gt) -> np.ndarray:
    """``xi_gt |d_hat_{i*} - d_gt|^2``; invisible ground truth contributes nothing."""
    xi_gt = np.asarray(xi_gt, dtype=np.float64)
    vis = xi_gt > 0
    out = np.zeros(len(xi_gt))
    diff = pred.depth[vis] - np.asarray(d_gt, dtype=np.float64)[vis]
    out[vis] = xi_gt[vis] * diff * diff
    return out


def loss_visibility(pred_xi, xi_gt) -> np.ndarray:
    """Binary cross entropy with the prediction clamped away from 0 and 1."""
    x = np.clip(np.asarray(pred_xi, dtype=np.float64), BCE_CLAMP, 1.0 - BCE_CLAMP)
    y = np.asarray(xi_gt, dtype=np.float64)
    return -(y * np.log(x) + (1.0 - y) * np.log1p(-x))


def loss_normals(pred_normal, n_gt, xi_gt) -> np.ndarray:
    """``-xi_gt |n_gt . n_hat|``; rows without a usable normal contribute 0."""
    cos = np.abs(dot(as_points(pred_normal), as_points(n_gt)))
    xi_gt = np.asarray(xi_gt, dtype=np.float64)
    return np.where((xi_gt > 0) & np.isfinite(cos), -xi_gt * np.nan_to_num(cos), 0.0)


def loss_directed_eikonal(field: Field, p, v, xi_gt, cfg: FdConfig = FdConfig(), weights: LossWeights = LossWeights()) -> np.ndarray:
    """``gamma_Ed sum_i xi [grad d_i . v + 1]^2 + gamma_Exi [grad xi . v]^2``.

    Components whose probes are undefined (infinite depth) at a row are skipped there.
    """
    p, v = as_points(p), as_points(v)
    xi_gt = np.asarray(xi_gt, dtype=np.float64)
    total = np.zeros(len(p))
    for i in range(field.n_components):
        g = grad_p(field, p, v, cfg, component=i, strict=False)
        r = dot(g, v) + 1.0
        total += weights.gamma_Ed * np.where(np.isfinite(r) & (xi_gt > 0), xi_gt * np.nan_to_num(r) ** 2, 0.0)
    dxi = visibility_residual(field, p, v, cfg)
    return total + weights.gamma_Exi * dxi**2


def loss_weight_variance(w) -> np.ndarray:
    """``prod_i w_i`` per row."""
    w = np.asarray(w, dtype=np.float64)
    return np.prod(np.atleast_2d(w), axis=1)


def loss_weight_transition(field: Field, p, v, n_gt, epsilon_T: float = 0.1, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """``max(0, epsilon_T - |grad w_1 . n|)^2`` with ``grad w_1`` by finite differences."""
    g = grad_p_scalar(field, p, v, cfg, which="w1")
    speed = np.abs(dot(g, as_points(n_gt)))
    return np.maximum(0.0, epsilon_T - speed) ** 2


def loss_visibility_variance(xi, gamma: float = 0.25) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    return gamma * xi * (1.0 - xi)


_ALL = frozenset(SampleType)
_NO_STO = frozenset({SampleType.U, SampleType.A, SampleType.B})
# which sample types each term is evaluated on
APPLICABILITY = {
    "d": _ALL,
    "xi": _ALL,
    "n": _NO_STO,
    "DE": _NO_STO,
    "V": _NO_STO,
    "T": frozenset({SampleType.S, SampleType.T}),
}


def total_shape_loss(field: Field, batch: LabeledBatch, weights: LossWeights = LossWeights(), cfg: FdConfig = FdConfig(),
                     applicability: dict | None = None) -> tuple[float, dict[str, float]]:
    """Weighted sum of per-term means, each over the samples the term applies to.

    The breakdown holds the weighted contribution of each term plus two diagnostics kept
    out of the total: ``Vxi`` (visibility variance) and ``n_floor`` (the lowest value the
    normals term can take on this batch, reached by a perfect field). The weight-field
    terms need a weight field to act on, so single-component fields contribute 0 there.
    """
    app = APPLICABILITY if applicability is None else applicability
    terms = {k: 0.0 for k in ("d", "xi", "n", "DE", "V", "T")}
    terms["Vxi"] = 0.0
    terms["n_floor"] = 0.0
    if len(batch) == 0:
        return 0.0, terms

    stype = np.asarray(batch.stype)
    mask = {k: np.isin(stype, [int(t) for t in app[k]]) for k in app}
    pred = field.query(batch.p, batch.v)

    def mean(values, m):
        return float(np.mean(values[m])) if np.any(m) else 0.0

    double = np.isin(stype, [int(SampleType.A), int(SampleType.U)])
    gd = weights.gamma_d * np.where(double, 2.0, 1.0)
    terms["d"] = mean(gd * loss_min_distance(pred, batch.xi, batch.d), mask["d"])
    terms["xi"] = weights.gamma_xi * mean(loss_visibility(pred.xi, batch.xi), mask["xi"])

    m = mask["n"]
    if np.any(m):
        nhat = field_normals(field, batch.p[m], batch.v[m], cfg)
        terms["n"] = weights.gamma_n * float(np.mean(loss_normals(nhat, batch.n[m], batch.xi[m])))
        terms["n_floor"] = -weights.gamma_n * float(np.mean(batch.xi[m]))
    if np.any(mask["DE"]):
        sub = batch.take(mask["DE"])
        terms["DE"] = float(np.mean(loss_directed_eikonal(field, sub.p, sub.v, sub.xi, cfg, weights)))

    if field.n_components > 1:
        terms["V"] = weights.gamma_V * mean(loss_weight_variance(pred.weights), mask["V"])
        m = mask["T"]
        if np.any(m):
            n_ref = np.where(np.isfinite(batch.n_origin[m]), batch.n_origin[m], batch.n[m])
            lt = loss_weight_transition(field, batch.p[m], batch.v[m], n_ref, weights.epsilon_T, cfg)
            terms["T"] = weights.gamma_T * float(np.mean(lt))
    terms["Vxi"] = float(np.mean(loss_visibility_variance(pred.xi, weights.gamma_Vxi)))

    total = sum(terms[k] for k in ("d", "xi", "n", "DE", "V", "T"))
    return float(total), terms
