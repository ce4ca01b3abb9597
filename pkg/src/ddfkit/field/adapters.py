"""Concrete fields: induced-shape adapters and closed-form delta mixtures."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..geometry.induced import InducedField
from ..geometry.shapes import Sphere
from ..geometry.vecmath import as_points
from .base import Field, FieldSample

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class InducedFieldAdapter(Field):
    """The exact induced ``(xi, d)`` of a shape as a single-component field (``w_1 = 1``)."""

    n_components = 1

    def __init__(self, shape: InducedField):
        self.shape = shape

    @property
    def domain(self):
        return self.shape.domain

    def query(self, p, v) -> FieldSample:
        res = self.shape.query(p, v)
        return FieldSample(res.xi, res.d[:, None], np.ones((len(res.d), 1)))

    def oracle_normals(self, p, v) -> tuple[np.ndarray, np.ndarray]:
        res = self.shape.query(p, v)
        return res.normal, res.reliable


def induced_field_adapter(shape: InducedField) -> InducedFieldAdapter:
    return InducedFieldAdapter(shape)


class DeltaMixtureField(Field):
    """Two-component PDDF from closed-form sub-fields; ``w_2 = 1 - w_1``."""

    n_components = 2

    def __init__(self, xi: ArrayFn, d1: ArrayFn, d2: ArrayFn, w1: ArrayFn):
        self._xi, self._d1, self._d2, self._w1 = xi, d1, d2, w1

    def query(self, p, v) -> FieldSample:
        p = as_points(p)
        v = as_points(v)
        w1 = np.clip(np.asarray(self._w1(p, v), dtype=np.float64), 0.0, 1.0)
        depths = np.stack([self._d1(p, v), self._d2(p, v)], axis=1)
        weights = np.stack([w1, 1.0 - w1], axis=1)
        return FieldSample(self._xi(p, v), depths, weights)


def _sphere_depth(sphere: Sphere) -> ArrayFn:
    def depth(p, v):
        t, _ = sphere.intersect(p, v)
        return t

    return depth


def nested_spheres_mixture(outer: Sphere, inner: Sphere, sharpness: float = 200.0) -> DeltaMixtureField:
    """PDDF of a sphere nested inside another, with the outer surface as component 1.

    ``w_1`` is a logistic function of the signed distance of ``p`` to the outer sphere,
    crossing 0.5 exactly on it. Outside, component 1 (the outer surface) carries the
    output depth; once ``p`` passes through the outer surface the output jumps to
    component 2, the inner surface (or the far side of the outer one when the inner sphere
    is missed). Rays also see the other surface through the second component.
    """
    d_outer = _sphere_depth(outer)
    d_inner = _sphere_depth(inner)

    def d2(p, v):
        a = d_inner(p, v)
        return np.where(np.isfinite(a), a, d_outer(p, v))

    def xi(p, v):
        return (np.isfinite(d_outer(p, v)) | np.isfinite(d_inner(p, v))).astype(np.float64)

    def w1(p, v):
        s = np.linalg.norm(p - outer.center, axis=-1) - outer.radius
        return 0.5 * (1.0 + np.tanh(0.5 * sharpness * s))

    return DeltaMixtureField(xi, d_outer, d2, w1)


class ScaledDepthField(Field):
    """``(xi, scale * d)``: a deliberately non-eikonal corruption of a field."""

    def __init__(self, inner: Field, scale: float):
        self.inner = inner
        self.scale = scale
        self.n_components = inner.n_components

    def query(self, p, v) -> FieldSample:
        s = self.inner.query(p, v)
        return FieldSample(s.xi, self.scale * s.depths, s.weights)
