"""Limit temperatures of thermal negativities and the curves built from them.

All temperatures are reduced, ``t = T / |v_x|``.  A chain is fixed by
``(n, topology, delta, b_bar, v_sign)``; :meth:`ChainSpec.from_reduced` builds it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entanglement import EPS_NEG, Bipartition, negativity, pt_sign_test
from .errors import ScanRangeError, ValidationError
from .spectral import decompose, thermal_state
from .spinchain import ChainSpec

T_MIN = 1e-3
T_MAX = 50.0
SCAN_POINTS = 400
TOL = 1e-6


@dataclass
class NegativityProfile:
    n: int
    topology: str
    delta: float
    b_bar: float
    v_sign: int
    label: str
    t: np.ndarray
    values: np.ndarray
    k: np.ndarray


@dataclass
class LimitTemperature:
    """Largest temperature with non-zero negativity.

    ``t_limit`` is None when the negativity vanishes on the whole scan.
    ``bracket`` is the final bisection interval (entangled, separable).
    ``k_at_limit`` counts negative partial-transpose eigenvalues at
    ``t_limit - 10 tol``.  ``reentry_intervals`` lists ``(t_on, t_off)`` windows of non-zero
    negativity that open after a separable stretch, the last of which ends
    at ``t_limit`` when the entanglement at ``t_limit`` is itself a reentry.
    """

    t_limit: float | None
    bracket: tuple[float, float] | None
    tol: float
    reentry_intervals: list[tuple[float, float]] = field(default_factory=list)
    k_at_limit: int = 0
    positive_at_t_min: bool = False


class _Evaluator:
    """Negativity of one chain and bipartition as a function of t."""

    def __init__(self, spec: ChainSpec, part: Bipartition, eps_neg: float):
        if part.n != spec.n:
            raise ValidationError(f"bipartition {part} does not fit n={spec.n}")
        self.decomp = decompose(spec)
        self.scale = abs(spec.v_x) or 1.0
        self.b = spec.b
        self.part = part
        self.eps = eps_neg

    def state(self, t: float) -> np.ndarray:
        return thermal_state(self.decomp, t * self.scale)

    def __call__(self, t: float) -> tuple[float, int]:
        rep = negativity(self.state(t), self.part, self.eps, method="blocked")
        return rep.value, rep.k

    def sign(self, t: float) -> tuple[bool, int]:
        """Entangled flag and negative-eigenvalue count used for crossings."""
        if self.part.is_global:
            return pt_sign_test(self.state(t), self.part, self.b / (t * self.scale), self.eps,
                                "blocked")
        value, k = self(t)
        return value > self.eps, k

    def entangled(self, t: float) -> bool:
        return self.sign(t)[0]


def negativity_profile(spec: ChainSpec, part: Bipartition, t_grid,
                       eps_neg: float = EPS_NEG) -> NegativityProfile:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or not len(t) or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValidationError("t grid must be positive and strictly increasing")
    ev = _Evaluator(spec, part, eps_neg)
    vals, ks = zip(*(ev(x) for x in t))
    return NegativityProfile(spec.n, spec.topology, spec.delta, spec.b_bar, spec.v_sign,
                             part.label, t, np.array(vals), np.array(ks))


def _bisect(pred, lo: float, hi: float, pred_lo: bool, tol: float) -> tuple[float, float]:
    """Shrink ``[lo, hi]`` around the flip of ``pred`` until ``hi - lo <= tol``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == pred_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def limit_temperature(spec: ChainSpec, part: Bipartition, t_min: float = T_MIN,
                      t_max: float = T_MAX, points: int = SCAN_POINTS, tol: float = TOL,
                      eps_neg: float = EPS_NEG) -> LimitTemperature:
    """Locate the last positive-to-zero crossing of the negativity in t.

    A log-spaced scan finds the sign changes of ``N - eps_neg``; each edge is
    then bisected to ``tol``.  Raises ScanRangeError if the negativity is
    still positive at ``t_max``.  Global splits are tested in the field-free
    frame (see :func:`pt_sign_test`), reduced splits on the reduced state.
    """
    if not 0 < t_min < t_max or points < 2 or tol <= 0:
        raise ValidationError("need 0 < t_min < t_max, points >= 2 and tol > 0")
    ev = _Evaluator(spec, part, eps_neg)
    grid = np.geomspace(t_min, t_max, points)
    ent = np.array([ev.entangled(t) for t in grid])
    if ent[-1]:
        raise ScanRangeError(f"{part.label} still entangled at t_max={t_max}; widen the scan")
    if not ent.any():
        return LimitTemperature(None, None, tol)

    edges = []  # (t_on or None, t_off)
    on = None if ent[0] else 0.0
    for i in range(points - 1):
        if not ent[i] and ent[i + 1]:
            lo, hi = _bisect(ev.entangled, grid[i], grid[i + 1], False, tol)
            on = 0.5 * (lo + hi)
        elif ent[i] and not ent[i + 1]:
            lo, hi = _bisect(ev.entangled, grid[i], grid[i + 1], True, tol)
            edges.append((on, 0.5 * (lo + hi), (lo, hi)))
    t_on, t_limit, bracket = edges[-1]
    # at the bracket the negative eigenvalues only just sum to eps_neg, so
    # count them a little further inside the entangled side
    t_in = max(bracket[0] - 10 * tol, t_on or t_min, t_min)
    ent_in, k = ev.sign(t_in)
    if not ent_in:
        k = ev.sign(bracket[0])[1]
    reentry = [(float(a), float(b)) for a, b, _ in edges if a is not None]
    return LimitTemperature(float(t_limit), tuple(map(float, bracket)), tol, reentry, k, bool(ent[0]))


# ----------------------------------------------------------- bipartitions


def _symmetry_maps(n: int) -> list[list[int]]:
    maps = []
    for r in range(n):
        maps.append([(i + r) % n for i in range(n)])
        maps.append([(r - i) % n for i in range(n)])
    return maps


def _image(mask: int, perm: list[int]) -> int:
    return sum(1 << perm[i] for i in range(len(perm)) if mask >> i & 1)


def _class_rep(n: int, keep: int, part_a: int, maps) -> Bipartition:
    best = None
    for perm in maps:
        k = _image(keep, perm)
        a = _image(part_a, perm)
        for side in (a, k & ~a):
            cand = Bipartition(n, side, k)
            key = (not cand.keep & 1, bin(cand.part_a).count("1"), cand.label)
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def _sort_key(p: Bipartition):
    return (bin(p.keep).count("1"), bin(p.part_a).count("1"), p.label)


def all_global_bipartitions(n: int, topology: str = "cyclic-nn") -> list[Bipartition]:
    """One representative per symmetry class of global splits.

    Classes are taken under ring rotations and reflections (all permutations
    for the fully connected cluster) and exchange of the two sides.
    """
    if not 2 <= n <= 12:
        raise ValidationError("n must lie in [2, 12]")
    full = (1 << n) - 1
    if topology == "fully-connected":
        return [Bipartition(n, (1 << m) - 1) for m in range(1, n // 2 + 1)]
    maps = _symmetry_maps(n)
    reps = {}
    for a in range(1, full, 2):  # site a on side A
        if bin(a).count("1") > n // 2:
            continue
        rep = _class_rep(n, full, a, maps)
        reps[rep.label] = rep
    return sorted(reps.values(), key=_sort_key)


def all_reduced_bipartitions(n: int, topology: str = "cyclic-nn") -> list[Bipartition]:
    """Representatives of splits of proper subsystems with at least two sites."""
    full = (1 << n) - 1
    if topology == "fully-connected":
        return [Bipartition(n, (1 << m) - 1, (1 << k) - 1)
                for k in range(2, n) for m in range(1, k // 2 + 1)]
    maps = _symmetry_maps(n)
    reps = {}
    for keep in range(1, full):
        if bin(keep).count("1") < 2 or not keep & 1:
            continue
        sub = keep
        while sub:
            if sub != keep and sub & 1:
                rep = _class_rep(n, keep, sub, maps)
                reps[rep.label] = rep
            sub = (sub - 1) & keep
    return sorted(reps.values(), key=_sort_key)


# ----------------------------------------------------------------- curves


@dataclass
class BorderPoint:
    delta: float
    t_limit: float  # 0 when the negativity never switches on
    k_at_limit: int
    reentry_intervals: list


def border_curve(n: int, topology: str, v_sign: int, part: Bipartition, deltas,
                 b_bar: float = 0.0, tol: float = TOL, **scan) -> list[BorderPoint]:
    out = []
    for d in deltas:
        spec = ChainSpec.from_reduced(n, float(d), b_bar, v_sign, topology)
        lt = limit_temperature(spec, part, tol=tol, **scan)
        out.append(BorderPoint(float(d), lt.t_limit or 0.0, lt.k_at_limit, lt.reentry_intervals))
    return out


def kink_candidates(curve: list[BorderPoint]) -> list[float]:
    """Anisotropies where ``k_at_limit`` has a local minimum along a border curve.

    Slope discontinuities of the limit temperature go with changes in the
    number of negative partial-transpose eigenvalues at the border.
    """
    ks = [p.k_at_limit for p in curve]
    out = []
    for i in range(1, len(ks) - 1):
        if ks[i] < ks[i - 1] and ks[i] <= ks[i + 1] or ks[i] <= ks[i - 1] and ks[i] < ks[i + 1]:
            if ks[i] > 0:
                out.append(curve[i].delta)
    return out


@dataclass
class FieldIndependenceRow:
    delta: float
    t_limits: dict  # b_bar -> t_limit (0 when none)
    spread: float


def field_independence_report(n: int, topology: str, v_sign: int, part: Bipartition,
                              b_bars, deltas, tol: float = TOL, **scan) -> list[FieldIndependenceRow]:
    """Max |t_limit(b_bar) - t_limit(first b_bar)| per anisotropy."""
    rows = []
    for d in deltas:
        tl = {}
        for bb in b_bars:
            spec = ChainSpec.from_reduced(n, float(d), float(bb), v_sign, topology)
            tl[float(bb)] = limit_temperature(spec, part, tol=tol, **scan).t_limit or 0.0
        ref = next(iter(tl.values()))
        rows.append(FieldIndependenceRow(float(d), tl, max(abs(v - ref) for v in tl.values())))
    return rows
