"""Soft composition of transformed fields: visibility union and softmax depth blending."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import softmax

from .field.base import Field, FieldSample
from .geometry.domain import Domain
from .geometry.vecmath import as_points

ETA_T = 1e-2
EPSILON_S = 1e-2


@dataclass(frozen=True)
class RigidScale:
    """Object-to-world similarity ``x_w = scale * R x_o + translation``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    scale: float = 1.0

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-9):
            raise ValueError("rotation must be orthonormal")

    def to_object(self, p, v) -> tuple[np.ndarray, np.ndarray]:
        p, v = as_points(p), as_points(v)
        return ((p - self.translation) @ self.rotation) / self.scale, v @ self.rotation

    def point_to_world(self, x) -> np.ndarray:
        return self.scale * (as_points(x) @ self.rotation.T) + self.translation


def transform_oriented_point(T: RigidScale, p, v) -> tuple[np.ndarray, np.ndarray, float]:
    """World oriented points in object coordinates, plus the factor turning object depth into world depth."""
    po, vo = T.to_object(p, v)
    return po, vo, T.scale


def blend_weights(xi: np.ndarray, d: np.ndarray, eta_T: float = ETA_T, epsilon_s: float = EPSILON_S) -> np.ndarray:
    """``softmax_k(xi_k / (eta_T (epsilon_s + d_k)))`` along the last axis.

    ``d`` must be finite; invisible entries still enter with their ``xi`` in the logit.
    """
    logits = np.asarray(xi, dtype=np.float64) / (eta_T * (epsilon_s + np.asarray(d, dtype=np.float64)))
    return softmax(logits, axis=-1)


@dataclass
class CompositePart:
    transform: RigidScale
    field: Field
    domain: Domain | None = None  # object-space domain; rays are entered through it when given


class CompositeField(Field):
    """Single-component field composed from transformed parts.

    Each part is queried in its own coordinates. A part's undefined (infinite) depth is
    replaced by the world distance to where the ray leaves that part's domain, or, without
    a domain, by ``far``, so the blend stays finite. ``composite_visibility`` and
    ``composite_depth`` are also available as functions.
    """

    n_components = 1

    def __init__(self, parts: Sequence[CompositePart | tuple], eta_T: float = ETA_T, epsilon_s: float = EPSILON_S, far: float = 10.0):
        parts = [p if isinstance(p, CompositePart) else CompositePart(*p) for p in parts]
        if not parts:
            raise ValueError("a composite needs at least one part")
        if not (eta_T > 0 and epsilon_s > 0):
            raise ValueError("eta_T and epsilon_s must be positive")
        self.parts = parts
        self.eta_T = eta_T
        self.epsilon_s = epsilon_s
        self.far = far

    def part_queries(self, p, v) -> tuple[np.ndarray, np.ndarray]:
        """Per-part world ``(xi, d)`` arrays of shape ``(N, n_parts)`` with finite depths."""
        p, v = as_points(p), as_points(v)
        xi = np.zeros((len(p), len(self.parts)))
        d = np.zeros((len(p), len(self.parts)))
        for k, part in enumerate(self.parts):
            po, vo, s = transform_oriented_point(part.transform, p, v)
            if part.domain is None:
                sample = part.field.query(po, vo)
                dk = sample.depth
                fallback = np.full(len(p), self.far / s)
                xk = sample.xi
            else:
                pr, offset, hit = part.domain.entry_point(po, vo)
                xk = np.zeros(len(p))
                dk = np.full(len(p), np.inf)
                if np.any(hit):
                    sample = part.field.query(pr[hit], vo[hit])
                    xk[hit] = sample.xi
                    dk[hit] = offset[hit] + sample.depth
                _, t_far = part.domain.intersect(po, vo)
                fallback = np.where(np.isfinite(t_far), np.maximum(t_far, 0.0), self.far / s)
            dk = np.where(np.isfinite(dk), dk, fallback)
            xi[:, k] = xk
            d[:, k] = s * dk
        return xi, d

    def query(self, p, v) -> FieldSample:
        xi, d = self.part_queries(p, v)
        w = blend_weights(xi, d, self.eta_T, self.epsilon_s)
        vis = 1.0 - np.prod(1.0 - xi, axis=1)
        depth = np.sum(w * d, axis=1)
        return FieldSample(vis, depth[:, None], np.ones((len(vis), 1)))


def composite_visibility(c: CompositeField, p, v) -> np.ndarray:
    """``1 - prod_k (1 - xi_k)``: at least one part is visible."""
    xi, _ = c.part_queries(p, v)
    return 1.0 - np.prod(1.0 - xi, axis=1)


def composite_depth(c: CompositeField, p, v) -> np.ndarray:
    """Softmax-blended world depth; meaningful where ``composite_visibility > 0.5``."""
    xi, d = c.part_queries(p, v)
    return np.sum(blend_weights(xi, d, c.eta_T, c.epsilon_s) * d, axis=1)
