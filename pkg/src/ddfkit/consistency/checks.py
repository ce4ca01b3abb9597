"""Sampling-based view-consistency verifier.

Every constraint is checked on a finite probe batch; limits in the definitions are
discretised with fixed small offsets. A passing report therefore means "no violation was
found", not a proof.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from ..field.base import Field
from ..geometry.domain import Domain, ray_box
from ..geometry.vecmath import as_points, dot, random_directions

CHECK_NAMES = ("BC_d", "BC_xi", "DE_d", "DE_xi", "IO_d", "IO_xi", "compat_a", "compat_b")


@dataclass(frozen=True)
class Tolerances:
    de_tol: float = 1e-3
    io_radius: float = 1e-3
    io_dirs: int = 64
    zero_thresh: float = 1e-4
    probes_per_check: int = 10_000
    s_offsets: tuple[float, ...] = (1e-3, 1e-4)
    flip_tol: float = 1e-6
    de_step: float = 1e-4
    xi_grid: int = 64
    max_witnesses: int = 10

    def __post_init__(self):
        if min(self.de_tol, self.io_radius, self.zero_thresh, self.flip_tol, self.de_step) <= 0:
            raise ValueError("tolerances must be positive")
        if self.io_dirs < 1 or self.probes_per_check < 1 or self.xi_grid < 2:
            raise ValueError("probe counts must be positive")


@dataclass
class ConstraintReport:
    name: str
    checked: int = 0
    violations: int = 0
    worst_magnitude: float = 0.0
    witnesses: list = dc_field(default_factory=list)  # [(p, v)] as lists

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, p: np.ndarray, v: np.ndarray, bad: np.ndarray, magnitude: np.ndarray, limit: int = 10) -> "ConstraintReport":
        bad = np.asarray(bad, dtype=bool)
        self.checked += int(bad.size)
        self.violations += int(bad.sum())
        if np.any(bad):
            mag = np.asarray(magnitude, dtype=np.float64)[bad]
            mag = mag[np.isfinite(mag)]
            worst = float(mag.max()) if mag.size else float("inf")
            self.worst_magnitude = max(self.worst_magnitude, worst)
            for i in np.flatnonzero(bad)[: max(0, limit - len(self.witnesses))]:
                self.witnesses.append((as_points(p)[i].tolist(), as_points(v)[i].tolist()))
        return self

    def merge(self, other: "ConstraintReport", limit: int = 10) -> "ConstraintReport":
        out = ConstraintReport(self.name, self.checked + other.checked, self.violations + other.violations,
                               max(self.worst_magnitude, other.worst_magnitude), (self.witnesses + other.witnesses)[:limit])
        return out

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "worst_magnitude": self.worst_magnitude if np.isfinite(self.worst_magnitude) else "inf",
            "witnesses": [{"p": p, "v": v} for p, v in self.witnesses],
            "passed": self.passed,
        }


@dataclass
class VerifierReport:
    reports: dict[str, ConstraintReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "constraints": {k: r.to_dict() for k, r in self.reports.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------- probing helpers


def _query(field: Field, p, v):
    s = field.query(as_points(p), as_points(v))
    return s.xi > 0.5, s.depth


def _visible_probes(field: Field, dom: Domain, n: int, rng: np.random.Generator, max_rounds: int = 50):
    """Like :func:`sample_visible_rays` but keeps rays whose depth is undefined."""
    ps, vs, ds = [], [], []
    have = 0
    for _ in range(max_rounds):
        if have >= n:
            break
        m = max(2 * (n - have), 256)
        p = dom.sample_uniform(rng, m)
        v = random_directions(rng, m)
        vis, d = _query(field, p, v)
        ps.append(p[vis]), vs.append(v[vis]), ds.append(d[vis])
        have += int(vis.sum())
    if not ps:
        return np.empty((0, 3)), np.empty((0, 3)), np.empty(0)
    return np.concatenate(ps)[:n], np.concatenate(vs)[:n], np.concatenate(ds)[:n]


def sample_visible_rays(field: Field, dom: Domain, n: int, rng: np.random.Generator, max_rounds: int = 50):
    """``n`` oriented points in the domain whose rays are visible (fewer if the scene is empty)."""
    ps, vs, ds = [], [], []
    have = 0
    for _ in range(max_rounds):
        if have >= n:
            break
        m = max(2 * (n - have), 256)
        p = dom.sample_uniform(rng, m)
        v = random_directions(rng, m)
        vis, d = _query(field, p, v)
        ok = vis & np.isfinite(d)
        ps.append(p[ok]), vs.append(v[ok]), ds.append(d[ok])
        have += int(ok.sum())
    if not ps:
        return np.empty((0, 3)), np.empty((0, 3)), np.empty(0)
    return np.concatenate(ps)[:n], np.concatenate(vs)[:n], np.concatenate(ds)[:n]


def rays_through(dom: Domain, q: np.ndarray, u: np.ndarray, rng: np.random.Generator, s_min: float = 1e-3):
    """Start points ``q - t u`` inside the domain with ``t`` uniform in ``[s_min, exit]``."""
    back = dom.exit_distance(q, -u)
    t = s_min + rng.random(len(q)) * np.maximum(back - s_min, 0.0)
    t = np.minimum(t, back)
    return q - t[:, None] * u, t


def zero_membership(field: Field, q: np.ndarray, dirs: np.ndarray, offsets, tol: float, need_visible: bool) -> np.ndarray:
    """True where some direction in ``dirs`` (``(N, M, 3)``) shows a depth zero at ``q``:
    ``d(q - s u, u) <= s + tol`` for every offset ``s`` (and visibility when requested)."""
    n, m = dirs.shape[:2]
    good = np.ones((n, m), dtype=bool)
    qq = np.repeat(q, m, axis=0)
    uu = dirs.reshape(-1, 3)
    for s in offsets:
        vis, d = _query(field, qq - s * uu, uu)
        ok = np.isfinite(d) & (d <= s + tol)
        if need_visible:
            ok &= vis
        good &= ok.reshape(n, m)
    return np.any(good, axis=1)


def locate_flips(field: Field, dom: Domain, p: np.ndarray, v: np.ndarray, tol: float = 1e-6):
    """Bisection for a one-to-zero visibility flip on each ray.

    Rays visible at their start and invisible at the domain exit are bisected down to
    ``tol``; the visible-side endpoint is returned with the ray it came from.
    """
    p, v = as_points(p), as_points(v)
    exit_d = dom.exit_distance(p, v)
    vis0, _ = _query(field, p, v)
    end = p + exit_d[:, None] * v
    vis1, _ = _query(field, end, v)
    cand = vis0 & ~vis1 & (exit_d > tol)
    lo = np.zeros(int(cand.sum()))
    hi = exit_d[cand]
    pc, vc = p[cand], v[cand]
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        vis, _ = _query(field, pc + mid[:, None] * vc, vc)
        lo = np.where(vis, mid, lo)
        hi = np.where(vis, hi, mid)
    return pc + lo[:, None] * vc, pc, vc


# ---------------------------------------------------------------- per-field constraints


def check_bc_d(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """Depth stays positive in the outer shell: no probe there sees a zero, and no visible
    shell probe hits a surface point that itself lies in the shell."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = tol.probes_per_check
    p = dom.sample_shell(rng, n)
    v = random_directions(rng, n)
    vis, d = _query(field, p, v)
    near_zero = vis & (d <= tol.zero_thresh)
    q = p + np.where(vis, d, 0.0)[:, None] * v
    hit_in_shell = vis & np.isfinite(d) & dom.contains(q, tol=1e-12) & ~dom.in_inner(q)
    confirmed = np.zeros(n, dtype=bool)
    if np.any(hit_in_shell):
        s = 0.5 * tol.zero_thresh
        qi = q[hit_in_shell]
        vi2, d2 = _query(field, qi - s * v[hit_in_shell], v[hit_in_shell])
        confirmed[hit_in_shell] = vi2 & (d2 <= tol.zero_thresh)
    bad = near_zero | confirmed
    depth_into_shell = np.where(hit_in_shell, dom.epsilon - _distance_to_boundary(dom, q), tol.zero_thresh - d)
    return ConstraintReport("BC_d").record(p, v, bad, depth_into_shell, tol.max_witnesses)


def _distance_to_boundary(dom: Domain, x: np.ndarray) -> np.ndarray:
    x = as_points(x)
    return np.min(np.minimum(x - dom.min_corner, dom.max_corner - x), axis=1)


def outward_shell_rays(dom: Domain, n: int, rng: np.random.Generator):
    """Rays starting in the shell whose forward half-line misses the inner box."""
    ps, vs = [], []
    have = 0
    while have < n:
        m = max(2 * (n - have), 256)
        p = dom.sample_shell(rng, m)
        v = random_directions(rng, m)
        t0, t1 = ray_box(p, v, dom.inner_min, dom.inner_max)
        misses = (t0 > t1) | (t1 < 0.0)
        ps.append(p[misses]), vs.append(v[misses])
        have += int(misses.sum())
    return np.concatenate(ps)[:n], np.concatenate(vs)[:n]


def check_bc_xi(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """Outward rays from the shell that never meet the inner box are invisible."""
    rng = np.random.default_rng(1) if rng is None else rng
    p, v = outward_shell_rays(dom, tol.probes_per_check, rng)
    s = field.query(p, v)
    return ConstraintReport("BC_xi").record(p, v, s.xi >= 0.5, s.xi, tol.max_witnesses)


def check_de_d(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """Depth decreases at unit rate along visible rays, away from the zero at the hit."""
    rng = np.random.default_rng(2) if rng is None else rng
    h = tol.de_step
    p, v, d = sample_visible_rays(field, dom, 2 * tol.probes_per_check, rng)
    keep = np.flatnonzero(d > 10 * h)[: tol.probes_per_check]
    p, v, d = p[keep], v[keep], d[keep]
    s = rng.random(len(d)) * (d - 5 * h)
    x = p + s[:, None] * v
    visf, df = _query(field, x + h * v, v)
    visb, db = _query(field, x - h * v, v)
    with np.errstate(invalid="ignore"):
        slope = (df - db) / (2 * h)
        err = np.abs(slope + 1.0)
    bad = ~(visf & visb) | ~np.isfinite(err) | (err > tol.de_tol)
    return ConstraintReport("DE_d").record(x, v, bad, np.where(np.isfinite(err), err, np.inf), tol.max_witnesses)


def check_de_xi(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """Visibility never switches from 0 back to 1 while moving forward along a ray."""
    rng = np.random.default_rng(3) if rng is None else rng
    n = tol.probes_per_check
    p = dom.sample_uniform(rng, n)
    v = random_directions(rng, n)
    exit_d = dom.exit_distance(p, v)
    # jittered grid so that thin features are not always stepped over at the same place
    frac = (np.arange(tol.xi_grid)[None, :] + rng.random((n, tol.xi_grid))) / tol.xi_grid
    s = frac * exit_d[:, None]
    x = p[:, None, :] + s[..., None] * v[:, None, :]
    xi = field.query(x.reshape(-1, 3), np.repeat(v, tol.xi_grid, axis=0)).xi.reshape(n, tol.xi_grid)
    rise = np.diff(xi, axis=1)
    worst = rise.max(axis=1)
    bad = worst > 1e-9
    k = np.argmax(rise, axis=1)
    at = x[np.arange(n), k + 1]
    return ConstraintReport("DE_xi").record(np.where(bad[:, None], at, p), v, bad, worst, tol.max_witnesses)


def _zero_points(field: Field, dom: Domain, n: int, rng: np.random.Generator):
    p, v, d = sample_visible_rays(field, dom, n, rng)
    return p + d[:, None] * v, v


def check_io_d(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """A depth zero is a zero from every direction: ``d(q - s u, u) <= s`` for visible probes."""
    rng = np.random.default_rng(4) if rng is None else rng
    n_q = -(-tol.probes_per_check // tol.io_dirs)
    q, _ = _zero_points(field, dom, n_q, rng)
    rep = ConstraintReport("IO_d")
    if not len(q):
        return rep
    u = random_directions(rng, len(q) * tol.io_dirs)
    qq = np.repeat(q, tol.io_dirs, axis=0)
    worst = np.zeros(len(qq))
    bad = np.zeros(len(qq), dtype=bool)
    for s in tol.s_offsets:
        start = qq - s * u
        inside = dom.contains(start)
        vis, d = _query(field, start, u)
        over = np.where(vis & inside, d - s, -np.inf)
        bad |= over > tol.zero_thresh
        worst = np.maximum(worst, over)
    return rep.record(qq - tol.s_offsets[-1] * u, u, bad, worst, tol.max_witnesses)


def _ray_visibility_through(field: Field, dom: Domain, q: np.ndarray, tol: Tolerances, rng: np.random.Generator, name: str) -> ConstraintReport:
    rep = ConstraintReport(name)
    if not len(q):
        return rep
    qq = np.repeat(q, tol.io_dirs, axis=0)
    u = random_directions(rng, len(qq))
    start, _ = rays_through(dom, qq, u, rng, s_min=tol.io_radius)
    s = field.query(start, u)
    return rep.record(start, u, s.xi < 0.5, 1.0 - s.xi, tol.max_witnesses)


def check_io_xi(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> ConstraintReport:
    """Every ray through a located one-to-zero flip is visible."""
    rng = np.random.default_rng(5) if rng is None else rng
    n_q = -(-tol.probes_per_check // tol.io_dirs)
    q = estimate_flips(field, dom, n_q, rng, tol)
    return _ray_visibility_through(field, dom, q, tol, rng, "IO_xi")


def estimate_flips(field: Field, dom: Domain, n: int, rng: np.random.Generator, tol: Tolerances = Tolerances(), max_rounds: int = 50) -> np.ndarray:
    out = []
    have = 0
    for _ in range(max_rounds):
        if have >= n:
            break
        m = max(2 * (n - have), 256)
        q, _, _ = locate_flips(field, dom, dom.sample_uniform(rng, m), random_directions(rng, m), tol.flip_tol)
        out.append(q)
        have += len(q)
    return np.concatenate(out)[:n] if out else np.empty((0, 3))


def check_compatibility(field: Field, dom: Domain, tol: Tolerances = Tolerances(), rng: np.random.Generator | None = None) -> tuple[ConstraintReport, ConstraintReport]:
    """(a) rays through locally visible depth zeroes are visible; (b) every visible ray ends
    at a locally visible depth zero (finite hit that passes the membership test)."""
    rng = np.random.default_rng(6) if rng is None else rng
    n_q = -(-tol.probes_per_check // tol.io_dirs)
    q, v = _zero_points(field, dom, n_q, rng)
    if len(q):
        member = zero_membership(field, q, v[:, None, :], tol.s_offsets, tol.zero_thresh, need_visible=True)
        q = q[member]
    rep_a = _ray_visibility_through(field, dom, q, tol, rng, "compat_a")

    rep_b = ConstraintReport("compat_b")
    pv, vv, dv = _visible_probes(field, dom, tol.probes_per_check, rng)
    if len(pv):
        finite = np.isfinite(dv)
        member = np.zeros(len(dv), dtype=bool)
        if np.any(finite):
            qf = pv[finite] + dv[finite, None] * vv[finite]
            member[finite] = zero_membership(field, qf, vv[finite][:, None, :], tol.s_offsets, tol.zero_thresh, need_visible=True)
        rep_b.record(pv, vv, ~member, np.where(finite, 0.0, np.inf), tol.max_witnesses)
    return rep_a, rep_b


def check_vc_inequality(field: Field, dom: Domain, n_pairs: int = 10_000, rng: np.random.Generator | None = None,
                        tol: Tolerances = Tolerances()) -> ConstraintReport:
    """For a visible ``tau_1`` with hit ``q_1`` and ``tau_2`` whose ray reaches ``q_1`` at
    parameter ``t``: ``tau_2`` is visible and ``d(tau_2) <= t``."""
    rng = np.random.default_rng(7) if rng is None else rng
    p1, v1, d1 = sample_visible_rays(field, dom, n_pairs, rng)
    rep = ConstraintReport("VC")
    if not len(p1):
        return rep
    q1 = p1 + d1[:, None] * v1
    u = random_directions(rng, len(q1))
    p2, t = rays_through(dom, q1, u, rng, s_min=tol.io_radius)
    vis, d2 = _query(field, p2, u)
    with np.errstate(invalid="ignore"):
        excess = np.where(vis, d2 - t, np.inf)
    bad = ~vis | ~(excess <= tol.de_tol)
    return rep.record(p2, u, bad, excess, tol.max_witnesses)


def run_checks(field: Field, dom: Domain, tol: Tolerances = Tolerances(), seed: int = 0) -> VerifierReport:
    """All eight constraints, each on its own stream spawned from ``seed``."""
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(7)]
    reports = {
        "BC_d": check_bc_d(field, dom, tol, streams[0]),
        "BC_xi": check_bc_xi(field, dom, tol, streams[1]),
        "DE_d": check_de_d(field, dom, tol, streams[2]),
        "DE_xi": check_de_xi(field, dom, tol, streams[3]),
        "IO_d": check_io_d(field, dom, tol, streams[4]),
        "IO_xi": check_io_xi(field, dom, tol, streams[5]),
    }
    reports["compat_a"], reports["compat_b"] = check_compatibility(field, dom, tol, streams[6])
    return VerifierReport(reports)
