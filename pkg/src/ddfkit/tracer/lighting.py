"""Environment light ``E_L(v)`` and emission ``M_L(q, omega_o)``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry.vecmath import as_points, normalize
from .materials import spectrum


@dataclass(frozen=True)
class ConstantEnvironment:
    radiance: np.ndarray = field(default_factory=lambda: np.ones(3))

    def __post_init__(self):
        object.__setattr__(self, "radiance", spectrum(self.radiance, "radiance"))

    def __call__(self, v) -> np.ndarray:
        return np.broadcast_to(self.radiance, (len(as_points(v)), 3)).copy()


@dataclass(frozen=True)
class GradientEnvironment:
    """Linear blend from ``bottom`` (``v = -up``) to ``top`` (``v = up``)."""

    bottom: np.ndarray = field(default_factory=lambda: np.full(3, 0.1))
    top: np.ndarray = field(default_factory=lambda: np.ones(3))
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        object.__setattr__(self, "bottom", spectrum(self.bottom, "bottom"))
        object.__setattr__(self, "top", spectrum(self.top, "top"))
        object.__setattr__(self, "up", normalize(np.asarray(self.up, dtype=np.float64)[None, :])[0])

    def __call__(self, v) -> np.ndarray:
        t = 0.5 * (1.0 + as_points(v) @ self.up)
        return (1.0 - t)[:, None] * self.bottom + t[:, None] * self.top


@dataclass(frozen=True)
class TwoToneSky:
    """Sky colour above the horizon, ground colour below, joined by a smoothstep band of
    half-width ``softness`` in ``v . up`` (0 gives a hard horizon)."""

    sky: np.ndarray = field(default_factory=lambda: np.array([0.6, 0.75, 1.0]))
    ground: np.ndarray = field(default_factory=lambda: np.array([0.35, 0.25, 0.15]))
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    softness: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "sky", spectrum(self.sky, "sky"))
        object.__setattr__(self, "ground", spectrum(self.ground, "ground"))
        object.__setattr__(self, "up", normalize(np.asarray(self.up, dtype=np.float64)[None, :])[0])
        if self.softness < 0:
            raise ValueError("softness must be non-negative")

    def __call__(self, v) -> np.ndarray:
        h = as_points(v) @ self.up
        if self.softness == 0:
            t = (h >= 0).astype(np.float64)
        else:
            x = np.clip(0.5 * (h / self.softness + 1.0), 0.0, 1.0)
            t = x * x * (3.0 - 2.0 * x)
        return (1.0 - t)[:, None] * self.ground + t[:, None] * self.sky


@dataclass(frozen=True)
class ConstantEmission:
    radiance: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "radiance", spectrum(self.radiance, "emission"))

    def __call__(self, q, omega_o) -> np.ndarray:
        return np.broadcast_to(self.radiance, (len(as_points(q)), 3)).copy()


@dataclass(frozen=True)
class Lighting:
    environment: object = field(default_factory=ConstantEnvironment)
    emission: object = field(default_factory=ConstantEmission)
