"""BRDFs and their bounce samplers, from Lambertian to a Phong-like glossy mix.

Direction conventions: ``omega_o`` points from the surface point back towards the viewer,
``omega_i = -v_n`` is the incoming direction travelling *into* the surface point, and
``n`` is the normal on the viewer's side (``omega_o . n > 0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry.vecmath import as_points, dot, normalize, reflect, uniform_hemisphere

DENSITY_CLAMP = (1e-6, 1e6)
GAUSS_RETRIES = 16
MIRROR_TOL = 1e-9


def spectrum(x, name: str = "spectrum", upper: float | None = None) -> np.ndarray:
    """Validated RGB triple (shape ``(3,)``): finite and non-negative, optionally ``<= upper``."""
    s = np.broadcast_to(np.asarray(x, dtype=np.float64), (3,)).copy()
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError(f"{name} must be finite and non-negative")
    if upper is not None and np.any(s > upper):
        raise ValueError(f"{name} must be <= {upper}")
    return s


@dataclass(frozen=True)
class Lambertian:
    rho_a: np.ndarray = field(default_factory=lambda: np.full(3, 0.8))

    def __post_init__(self):
        object.__setattr__(self, "rho_a", spectrum(self.rho_a, "rho_a", 1.0))


@dataclass(frozen=True)
class Mirror:
    rho_m: np.ndarray = field(default_factory=lambda: np.full(3, 0.9))

    def __post_init__(self):
        object.__setattr__(self, "rho_m", spectrum(self.rho_m, "rho_m", 1.0))


@dataclass(frozen=True)
class Glossy:
    rho_a: np.ndarray = field(default_factory=lambda: np.full(3, 0.8))
    rho_m: np.ndarray = field(default_factory=lambda: np.full(3, 0.9))
    eta_L: float = 0.25
    alpha: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "rho_a", spectrum(self.rho_a, "rho_a", 1.0))
        object.__setattr__(self, "rho_m", spectrum(self.rho_m, "rho_m", 1.0))
        if not 0.0 < self.eta_L < 1.0:
            raise ValueError("eta_L must lie in (0, 1)")
        if not self.alpha >= 0.0:
            raise ValueError("alpha must be non-negative")

    @property
    def sigma2(self) -> float:
        """Per-axis variance of the reflection-direction noise."""
        return 3.5 * 10.0 ** (-self.alpha) * np.exp(-self.alpha)


Material = Lambertian | Mirror | Glossy


def glossy_normaliser(alpha: float, cos_i: np.ndarray) -> np.ndarray:
    """``pi^(1/(1+alpha)) |omega_i . n|^(alpha/(1+alpha))``."""
    return np.pi ** (1.0 / (1.0 + alpha)) * np.abs(cos_i) ** (alpha / (1.0 + alpha))


def brdf_eval(mat: Material, q, omega_i, omega_o, n) -> np.ndarray:
    """BRDF value per row, shape ``(N, 3)``; zero outside the hemisphere.

    The mirror's delta is represented by its weight ``rho_m / |omega_r . n|`` on queries
    where ``omega_o`` is the exact reflection (to ``1e-9``) and 0 elsewhere.
    """
    omega_i, omega_o, n = as_points(omega_i), as_points(omega_o), as_points(n)
    cos_i = dot(omega_i, n)
    cos_o = dot(omega_o, n)
    valid = (cos_i < 0.0) & (cos_o > 0.0)
    out = np.zeros((len(n), 3))
    if isinstance(mat, Lambertian):
        out[valid] = mat.rho_a / np.pi
    elif isinstance(mat, Mirror):
        w_r = reflect(omega_i, n)
        exact = valid & (np.linalg.norm(w_r - omega_o, axis=1) <= MIRROR_TOL)
        out[exact] = mat.rho_m[None, :] / np.abs(dot(w_r[exact], n[exact]))[:, None]
    elif isinstance(mat, Glossy):
        w_r = reflect(omega_i, n)
        lobe = np.maximum(dot(omega_o, w_r), 0.0) ** mat.alpha
        spec = (1.0 - mat.eta_L) * lobe / glossy_normaliser(mat.alpha, cos_i)
        out[valid] = mat.eta_L * mat.rho_a / np.pi + spec[valid, None] * mat.rho_m
    else:
        raise TypeError(f"unknown material {type(mat).__name__}")
    return out


@dataclass
class BounceStats:
    """Counters for events that bend the estimator: Gaussian fall-backs and bad normals."""

    gaussian_fallbacks: int = 0
    degenerate_normals: int = 0


def gaussian_density(zeta: np.ndarray, sigma2: float) -> np.ndarray:
    """Isotropic 3D normal density ``N(zeta | 0, sigma2 I)``."""
    r2 = np.sum(zeta * zeta, axis=-1)
    return np.exp(-0.5 * r2 / sigma2) / (2.0 * np.pi * sigma2) ** 1.5


def sample_bounce(mat: Material, q, omega_o, n, rng: np.random.Generator, stats: BounceStats | None = None,
                  return_mode: bool = False):
    """Draw one outgoing direction per row and its inverse sampling density.

    Returns ``(v_n, inv_density)``, plus the boolean "uniform mode fired" mask when
    ``return_mode`` is set.
    """
    omega_o, n = as_points(omega_o), as_points(n)
    m = len(n)
    uniform = np.ones(m, dtype=bool)
    if isinstance(mat, Lambertian):
        v = uniform_hemisphere(rng, n)
        inv = np.full(m, 2.0 * np.pi)
    elif isinstance(mat, Mirror):
        v = reflect(-omega_o, n)
        inv = np.ones(m)
        uniform[:] = False
    elif isinstance(mat, Glossy):
        uniform = rng.random(m) < mat.eta_L
        v = np.empty((m, 3))
        inv = np.empty(m)
        v[uniform] = uniform_hemisphere(rng, n[uniform])
        inv[uniform] = 2.0 * np.pi / mat.eta_L
        g = np.flatnonzero(~uniform)
        w_r = reflect(-omega_o[g], n[g])
        sd = np.sqrt(mat.sigma2)
        pending = np.ones(len(g), dtype=bool)
        zeta = np.zeros((len(g), 3))
        for _ in range(GAUSS_RETRIES):
            if not np.any(pending):
                break
            k = np.flatnonzero(pending)
            z = sd * rng.standard_normal((len(k), 3))
            cand = w_r[k] + z
            ok = dot(cand, n[g[k]]) > 1e-12
            zeta[k[ok]] = z[ok]
            pending[k[ok]] = False
        done = g[~pending]
        v[done] = normalize(w_r[~pending] + zeta[~pending])
        dens = np.clip(gaussian_density(zeta[~pending], mat.sigma2), *DENSITY_CLAMP)
        inv[done] = 1.0 / ((1.0 - mat.eta_L) * dens)
        failed = g[pending]
        if failed.size:
            # no valid Gaussian draw: fall back to the uniform mode
            v[failed] = uniform_hemisphere(rng, n[failed])
            inv[failed] = 2.0 * np.pi / mat.eta_L
            uniform[failed] = True
            if stats is not None:
                stats.gaussian_fallbacks += int(failed.size)
    else:
        raise TypeError(f"unknown material {type(mat).__name__}")
    return (v, inv, uniform) if return_mode else (v, inv)
