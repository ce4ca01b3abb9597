"""Mesh-derived oriented-point samplers (U/A/B/S/T/O) with ray-cast labels."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..geometry.domain import Domain
from ..geometry.induced import InducedField
from ..geometry.vecmath import dot, normalize, random_directions


class SampleType(enum.IntEnum):
    U = 0  # uniform position and direction
    A = 1  # towards a surface point
    B = 2  # from the domain boundary into the domain
    S = 3  # on the surface
    T = 4  # tangent to the surface
    O = 5  # tangent ray offset off the surface


@dataclass(frozen=True)
class SamplerConfig:
    epsilon_O: float = 0.05
    boundary_bias: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon_O > 0:
            raise ValueError("epsilon_O must be positive")
        if not 0.0 <= self.boundary_bias <= 1.0:
            raise ValueError("boundary_bias must lie in [0, 1]")


# full-scale amounts and a desk-scale preset, in SampleType order
FULL_COUNTS = {"U": 250_000, "A": 250_000, "B": 125_000, "S": 125_000, "T": 125_000, "O": 125_000}
DESK_COUNTS = {"U": 2500, "A": 2500, "B": 1250, "S": 1250, "T": 1250, "O": 1250}


@dataclass
class LabeledBatch:
    """Oriented points with ground truth.

    ``d`` is ``+inf`` and ``n`` is zero where ``xi == 0``. The auxiliary arrays are kept
    in memory only: ``origin``/``n_origin`` are the surface sample ``q0, n0`` behind
    A/S/T/O rows (nan otherwise), ``offset_sign`` is the O-type offset sign (0 otherwise)
    and ``on_boundary`` marks rows moved onto the domain boundary by the position bias.
    """

    p: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    d: np.ndarray
    n: np.ndarray
    stype: np.ndarray
    origin: np.ndarray = field(default=None)
    n_origin: np.ndarray = field(default=None)
    offset_sign: np.ndarray = field(default=None)
    on_boundary: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.p)
        if self.origin is None:
            self.origin = np.full((n, 3), np.nan)
        if self.n_origin is None:
            self.n_origin = np.full((n, 3), np.nan)
        if self.offset_sign is None:
            self.offset_sign = np.zeros(n, dtype=np.int8)
        if self.on_boundary is None:
            self.on_boundary = np.zeros(n, dtype=bool)

    def __len__(self) -> int:
        return len(self.p)

    def take(self, idx) -> "LabeledBatch":
        return LabeledBatch(
            self.p[idx], self.v[idx], self.xi[idx], self.d[idx], self.n[idx], self.stype[idx],
            self.origin[idx], self.n_origin[idx], self.offset_sign[idx], self.on_boundary[idx],
        )

    @staticmethod
    def concatenate(batches: list["LabeledBatch"]) -> "LabeledBatch":
        if not batches:
            return LabeledBatch(*(np.empty((0, 3)),) * 2, np.empty(0), np.empty(0), np.empty((0, 3)), np.empty(0, dtype=np.uint8))
        names = ["p", "v", "xi", "d", "n", "stype", "origin", "n_origin", "offset_sign", "on_boundary"]
        return LabeledBatch(*(np.concatenate([getattr(b, k) for b in batches]) for k in names))


def label(shape: InducedField, p: np.ndarray, v: np.ndarray, stype: np.ndarray) -> LabeledBatch:
    res = shape.query(p, v)
    return LabeledBatch(p, v, res.xi, res.d, res.normal, stype.astype(np.uint8))


def _slide_to_boundary(dom: Domain, p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Move ``p`` backwards along its ray onto the boundary of the domain."""
    back = dom.exit_distance(p, -v)
    return np.clip(p - back[:, None] * v, dom.min_corner, dom.max_corner)


def _tangent_directions(rng: np.random.Generator, n0: np.ndarray) -> np.ndarray:
    g = rng.standard_normal(n0.shape)
    t = g - dot(g, n0)[:, None] * n0
    return normalize(t)


def _towards_surface(rng, dom: Domain, q0: np.ndarray, v0: np.ndarray):
    """Uniform point on the segment from ``q0`` to the boundary along ``v0``; ray points back."""
    reach = dom.exit_distance(q0, v0)
    p = q0 + (rng.random(len(q0)) * reach)[:, None] * v0
    return p, -v0


def sample(stype: SampleType | str, shape: InducedField, dom: Domain, n: int, cfg: SamplerConfig, rng: np.random.Generator) -> LabeledBatch:
    """Draw ``n`` labeled samples of one type."""
    stype = SampleType[stype] if isinstance(stype, str) else SampleType(stype)
    tag = np.full(n, int(stype), dtype=np.uint8)
    if n == 0:
        return label(shape, np.empty((0, 3)), np.empty((0, 3)), tag)

    origin = np.full((n, 3), np.nan)
    n_origin = np.full((n, 3), np.nan)
    sign = np.zeros(n, dtype=np.int8)
    biased = np.zeros(n, dtype=bool)

    if stype is SampleType.U:
        p = dom.sample_uniform(rng, n)
        v = random_directions(rng, n)
    elif stype is SampleType.B:
        p, inward = dom.sample_boundary(rng, n)
        v = random_directions(rng, n)
        # mirror outward-pointing draws about the boundary face
        out = dot(v, inward) < 0
        v[out] = v[out] - 2.0 * dot(v[out], inward[out])[:, None] * inward[out]
    elif stype is SampleType.S:
        origin, n_origin = shape.sample_surface(rng, n)
        p = origin.copy()
        v = random_directions(rng, n)
    else:
        origin, n_origin = shape.sample_surface(rng, n)
        if stype is SampleType.A:
            v0 = random_directions(rng, n)
        else:
            v0 = _tangent_directions(rng, n_origin)
        p, v = _towards_surface(rng, dom, origin, v0)
        if stype is SampleType.O:
            sign = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
            p = p + (cfg.epsilon_O * sign)[:, None] * n_origin
            # an offset can leave the domain; pull those points back inside along the normal
            outside = ~dom.contains(p)
            if np.any(outside):
                p[outside] = np.clip(p[outside], dom.min_corner, dom.max_corner)
        biased = rng.random(n) < cfg.boundary_bias
        if np.any(biased):
            p[biased] = _slide_to_boundary(dom, p[biased], v[biased])

    out = label(shape, p, v, tag)
    out.origin, out.n_origin, out.offset_sign, out.on_boundary = origin, n_origin, sign, biased
    return out


def _parse_counts(counts) -> dict[SampleType, int]:
    if isinstance(counts, dict):
        parsed = {SampleType[k] if isinstance(k, str) else SampleType(k): int(c) for k, c in counts.items()}
    else:
        counts = list(counts)
        if len(counts) != len(SampleType):
            raise ValueError("counts must list one value per sample type (U, A, B, S, T, O)")
        parsed = {t: int(c) for t, c in zip(SampleType, counts)}
    if any(c < 0 for c in parsed.values()):
        raise ValueError("sample counts must be non-negative")
    return parsed


def sample_batch(counts, shape: InducedField, dom: Domain, cfg: SamplerConfig = SamplerConfig()) -> LabeledBatch:
    """Exact per-type counts, concatenated in U/A/B/S/T/O order.

    Each type draws from its own stream spawned from ``cfg.seed``, so the batch for one
    type does not depend on the counts of the others.
    """
    parsed = _parse_counts(counts)
    streams = np.random.SeedSequence(cfg.seed).spawn(len(SampleType))
    parts = []
    for t, ss in zip(SampleType, streams):
        k = parsed.get(t, 0)
        if k:
            parts.append(sample(t, shape, dom, k, cfg, np.random.default_rng(ss)))
    return LabeledBatch.concatenate(parts)
