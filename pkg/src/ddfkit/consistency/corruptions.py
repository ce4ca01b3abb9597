"""Hand-built inconsistent fields used to show the verifier is sensitive."""

from __future__ import annotations

import numpy as np

from ..field.adapters import ScaledDepthField
from ..field.base import Field, FieldSample
from ..geometry.vecmath import as_points, normalize, orthonormal_basis


class SquaredDepthField(Field):
    """``(xi, d^2)``: violates the unit-rate decrease away from ``d = 1``."""

    def __init__(self, inner: Field):
        self.inner = inner
        self.n_components = inner.n_components

    def query(self, p, v) -> FieldSample:
        s = self.inner.query(p, v)
        return FieldSample(s.xi, s.depths**2, s.weights)


class DilatedVisibilityField(Field):
    """Visibility is the max over a cone of nearby directions; depth is left untouched, so
    rays that graze past the silhouette become visible with no surface behind them."""

    def __init__(self, inner: Field, angle_deg: float = 5.0, n_ring: int = 8):
        self.inner = inner
        self.n_components = inner.n_components
        self.angle = np.deg2rad(angle_deg)
        self.n_ring = n_ring

    def query(self, p, v) -> FieldSample:
        p, v = as_points(p), as_points(v)
        s = self.inner.query(p, v)
        t1, t2 = orthonormal_basis(v)
        xi = s.xi.copy()
        for k in range(self.n_ring):
            phi = 2 * np.pi * k / self.n_ring
            u = normalize(np.cos(self.angle) * v + np.sin(self.angle) * (np.cos(phi) * t1 + np.sin(phi) * t2))
            xi = np.maximum(xi, self.inner.query(p, u).xi)
        return FieldSample(xi, s.depths, s.weights)


class DirectionalHoleField(Field):
    """Invisible, undefined-depth rays whenever ``v`` lies in one direction octant."""

    def __init__(self, inner: Field, octant=(1.0, 1.0, 1.0)):
        self.inner = inner
        self.n_components = inner.n_components
        self.octant = np.sign(np.asarray(octant, dtype=np.float64))

    def query(self, p, v) -> FieldSample:
        v = as_points(v)
        s = self.inner.query(p, v)
        hole = np.all(v * self.octant > 0, axis=1)
        depths = np.where(hole[:, None], np.inf, s.depths)
        return FieldSample(np.where(hole, 0.0, s.xi), depths, s.weights)


class OneSidedField(Field):
    """Visible only for rays travelling towards ``-axis`` (seen from the ``+axis`` side)."""

    def __init__(self, inner: Field, axis=(0.0, 0.0, 1.0)):
        self.inner = inner
        self.n_components = inner.n_components
        self.axis = normalize(np.asarray(axis, dtype=np.float64)[None, :])[0]

    def query(self, p, v) -> FieldSample:
        v = as_points(v)
        s = self.inner.query(p, v)
        hidden = v @ self.axis >= 0
        return FieldSample(np.where(hidden, 0.0, s.xi), np.where(hidden[:, None], np.inf, s.depths), s.weights)


class VisibleBlobField(Field):
    """``xi = 1`` inside a ball in free space, so rays crossing it flip 0 to 1 mid-ray."""

    def __init__(self, inner: Field, center=(0.85, 0.85, 0.0), radius: float = 0.08):
        self.inner = inner
        self.n_components = inner.n_components
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = float(radius)

    def query(self, p, v) -> FieldSample:
        p = as_points(p)
        s = self.inner.query(p, v)
        inside = np.linalg.norm(p - self.center, axis=1) < self.radius
        return FieldSample(np.where(inside, 1.0, s.xi), s.depths, s.weights)


class AxisZeroField(Field):
    """Depth reaches zero at the surface only for rays along ``+axis``; every other direction
    reports the true depth plus a fixed offset."""

    def __init__(self, inner: Field, axis=(0.0, 0.0, 1.0), offset: float = 0.05, cone_deg: float = 1.0):
        self.inner = inner
        self.n_components = inner.n_components
        self.axis = normalize(np.asarray(axis, dtype=np.float64)[None, :])[0]
        self.offset = offset
        self.cos_cone = np.cos(np.deg2rad(cone_deg))

    def query(self, p, v) -> FieldSample:
        v = as_points(v)
        s = self.inner.query(p, v)
        off = np.where(v @ self.axis >= self.cos_cone, 0.0, self.offset)
        return FieldSample(s.xi, s.depths + off[:, None], s.weights)


def catalogue(field: Field) -> dict[str, tuple[Field, str]]:
    """The five corruptions, each paired with the check it targets."""
    return {
        "depth_scale": (ScaledDepthField(field, 1.1), "DE_d"),
        "depth_square": (SquaredDepthField(field), "DE_d"),
        "visibility_dilation": (DilatedVisibilityField(field), "compat_b"),
        "anisotropic_hole": (DirectionalHoleField(field), "IO_xi"),
        "mid_ray_flip": (VisibleBlobField(field), "DE_xi"),
    }
