"""Explicit surface sampling: hop random points onto the shape along soft nearest directions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..compose import EPSILON_S, ETA_T, blend_weights
from ..field.base import Field
from ..geometry.domain import Domain
from ..geometry.vecmath import normalize, random_directions


@dataclass(frozen=True)
class CloudConfig:
    n_v: int = 128
    N_H: int = 3
    epsilon_p: float = 0.1
    n_points: int = 1000
    eta_T: float = ETA_T
    epsilon_s: float = EPSILON_S
    far: float = 10.0
    chunk: int = 2048

    def __post_init__(self):
        if self.n_v < 1 or self.N_H < 1 or self.epsilon_p < 0 or self.n_points < 0:
            raise ValueError("n_v and N_H must be positive, epsilon_p and n_points non-negative")


def soft_min_direction(field: Field, p: np.ndarray, cfg: CloudConfig, rng: np.random.Generator) -> np.ndarray:
    """Blend of ``n_v`` random directions weighted towards short visible depths."""
    n = len(p)
    dirs = random_directions(rng, n * cfg.n_v)
    s = field.query(np.repeat(p, cfg.n_v, axis=0), dirs)
    xi = s.xi.reshape(n, cfg.n_v)
    d = s.depth.reshape(n, cfg.n_v)
    d = np.where((xi > 0.5) & np.isfinite(d), d, cfg.far)
    w = blend_weights(xi, d, cfg.eta_T, cfg.epsilon_s)
    return normalize(np.einsum("nk,nkc->nc", w, dirs.reshape(n, cfg.n_v, 3)))


def _hop(field: Field, p: np.ndarray, cfg: CloudConfig, rng: np.random.Generator, rounds: int):
    last_xi = np.zeros(len(p))
    for _ in range(rounds):
        v_hat = soft_min_direction(field, p, cfg, rng)
        s = field.query(p, v_hat)
        vis = (s.xi > 0.5) & np.isfinite(s.depth)
        p = np.where(vis[:, None], p + np.where(vis, s.depth, 0.0)[:, None] * v_hat, p)
        last_xi = s.xi
    return p, last_xi


def sample_point_cloud(field: Field, domain: Domain, cfg: CloudConfig = CloudConfig(), rng: np.random.Generator | None = None) -> np.ndarray:
    """``n_points`` surface samples, shape ``(n_points, 3)``.

    ``(1 + epsilon_p) n_points`` uniform positions are hopped ``N_H`` times and the ones
    whose last hop was most visible are kept (stable order). Raises ``ValueError`` when no
    position ever sees the shape.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if cfg.n_points == 0:
        return np.empty((0, 3))
    total = int(np.ceil((1.0 + cfg.epsilon_p) * cfg.n_points))
    p = domain.sample_uniform(rng, total)
    pts, xi = [], []
    for a in range(0, total, cfg.chunk):
        q, x = _hop(field, p[a:a + cfg.chunk], cfg, rng, cfg.N_H)
        pts.append(q), xi.append(x)
    pts = np.concatenate(pts)
    xi = np.concatenate(xi)
    if not np.any(xi > 0.5):
        raise ValueError("no surface is visible from any sampled position; the scene looks empty")
    order = np.argsort(-xi, kind="stable")
    return pts[order[: cfg.n_points]]
