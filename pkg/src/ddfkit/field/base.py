"""The (P)DDF query interface.

A field maps oriented points ``(p, v)``, given as ``(N, 3)`` arrays with unit ``v``, to a
:class:`FieldSample`: visibility ``xi`` and a ``K``-component delta mixture of depths.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..geometry.vecmath import as_points


@dataclass
class FieldSample:
    xi: np.ndarray  # (N,)
    depths: np.ndarray  # (N, K); +inf marks an undefined component
    weights: np.ndarray  # (N, K), rows sum to 1

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=np.float64)
        self.depths = np.asarray(self.depths, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.depths.ndim == 1:
            self.depths = self.depths[:, None]
        if self.weights.ndim == 1:
            self.weights = self.weights[:, None]

    def __len__(self) -> int:
        return len(self.xi)

    @property
    def n_components(self) -> int:
        return self.depths.shape[1]

    @property
    def i_star(self) -> np.ndarray:
        """Index of the maximum-weight component; ties go to the lower index."""
        return np.argmax(self.weights, axis=1)

    @property
    def depth(self) -> np.ndarray:
        """Depth of the most probable component."""
        return self.depths[np.arange(len(self.xi)), self.i_star]

    @property
    def visible(self) -> np.ndarray:
        return self.xi > 0.5

    def take(self, idx) -> "FieldSample":
        return FieldSample(self.xi[idx], self.depths[idx], self.weights[idx])


def depth_argmax(sample: FieldSample) -> tuple[np.ndarray, np.ndarray]:
    """``(d_{i*}, i*)`` with ``i* = argmax_i w_i``."""
    return sample.depth, sample.i_star


class Field(ABC):
    """Deterministic, side-effect free field over oriented points."""

    n_components: int = 1

    @abstractmethod
    def query(self, p: np.ndarray, v: np.ndarray) -> FieldSample: ...

    def __call__(self, p, v) -> FieldSample:
        return self.query(as_points(p), as_points(v))


class CountingField(Field):
    """Wraps a field and counts oriented-point queries (one per row)."""

    def __init__(self, inner: Field):
        self.inner = inner
        self.n_components = inner.n_components
        self.count = 0
        self.calls = 0

    def query(self, p, v) -> FieldSample:
        p = as_points(p)
        self.count += len(p)
        self.calls += 1
        return self.inner.query(p, as_points(v))

    def reset(self) -> None:
        self.count = 0
        self.calls = 0


class FunctionField(Field):
    """Field built from closed-form callables ``xi(p, v)`` and ``d(p, v)`` (K = 1)."""

    def __init__(self, xi, d):
        self._xi = xi
        self._d = d

    def query(self, p, v) -> FieldSample:
        p = as_points(p)
        v = as_points(v)
        xi = np.asarray(self._xi(p, v), dtype=np.float64)
        d = np.asarray(self._d(p, v), dtype=np.float64)
        return FieldSample(xi, d[:, None], np.ones((len(p), 1)))
