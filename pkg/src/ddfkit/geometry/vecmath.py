"""Small vectorised helpers for 3-vectors stored as ``(..., 3)`` arrays."""

from __future__ import annotations

import hashlib

import numpy as np


def as_points(x) -> np.ndarray:
    """Coerce to a float64 ``(N, 3)`` array (a single vector becomes ``(1, 3)``)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
    return arr


def norm(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("...i,...i->...", x, x))


def normalize(x: np.ndarray) -> np.ndarray:
    n = norm(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        return x / n[..., None]


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def reflect(omega: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Mirror ``omega`` about the plane with unit normal ``n``: ``omega - 2 (omega.n) n``."""
    return omega - 2.0 * dot(omega, n)[..., None] * n


def random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform directions on the unit sphere."""
    g = rng.standard_normal((n, 3))
    nrm = norm(g)
    # a zero draw has probability zero, but guard anyway
    bad = nrm < 1e-12
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), 3))
        nrm = norm(g)
        bad = nrm < 1e-12
    return g / nrm[:, None]


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic, nearly uniform set of ``n`` unit directions."""
    if n < 1:
        raise ValueError("n must be positive")
    i = np.arange(n, dtype=np.float64) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def orthonormal_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two tangent vectors completing ``n`` to a right-handed frame (Duff et al. 2017)."""
    n = as_points(n)
    sign = np.where(n[:, 2] >= 0.0, 1.0, -1.0)
    a = -1.0 / (sign + n[:, 2])
    b = n[:, 0] * n[:, 1] * a
    t1 = np.stack([1.0 + sign * n[:, 0] ** 2 * a, sign * b, -sign * n[:, 0]], axis=-1)
    t2 = np.stack([b, sign + n[:, 1] ** 2 * a, -n[:, 1]], axis=-1)
    return t1, t2


def uniform_hemisphere(rng: np.random.Generator, n: np.ndarray) -> np.ndarray:
    """One uniform direction on the hemisphere about each row of ``n``."""
    n = as_points(n)
    u1 = rng.random(len(n))
    u2 = rng.random(len(n))
    z = 1.0 - u1  # in (0, 1], so samples never lie in the tangent plane
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * np.pi * u2
    t1, t2 = orthonormal_basis(n)
    return (r * np.cos(phi))[:, None] * t1 + (r * np.sin(phi))[:, None] * t2 + z[:, None] * n


def seed_from_array(x: np.ndarray) -> int:
    """Stable 64-bit seed derived from the bytes of an array."""
    h = hashlib.blake2b(np.ascontiguousarray(x, dtype=np.float64).tobytes(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def angle_deg(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angle between unit vectors in degrees (robust near 0 via atan2)."""
    c = np.cross(a, b)
    return np.degrees(np.arctan2(norm(c), dot(a, b)))
