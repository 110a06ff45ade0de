"""Closed forms for two- and three-spin mixtures with good total spin, the
thermal entanglement borders they imply, and the four-spin ring ground family.

Temperatures here are reduced, ``t = T / |v|``, and fields ``b_bar = |b / v|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import DomainError, ScanRangeError, ValidationError
from .spinchain import ChainSpec, magnetization, total_spin_energy, total_spin_levels

_LEVELS = {
    2: [(1.0, 1.0), (1.0, 0.0), (1.0, -1.0), (0.0, 0.0)],
    3: [(1.5, 1.5), (1.5, 0.5), (1.5, -0.5), (1.5, -1.5), (0.5, 0.5), (0.5, -0.5)],
}


@dataclass(frozen=True)
class SpinSectorWeights:
    """Weights ``p[S, M]`` of a mixture ``sum p P^S_M``.

    For three spins the S = 1/2 projectors are two-dimensional, so the
    normalization is ``sum p^{3/2} + 2 sum p^{1/2} = 1``.
    """

    n: int
    p: dict

    def __post_init__(self):
        if self.n not in _LEVELS:
            raise ValidationError("weights are defined for n = 2 or 3 only")
        p = {lvl: float(self.p.get(lvl, 0.0)) for lvl in _LEVELS[self.n]}
        extra = set(self.p) - set(p)
        if extra:
            raise ValidationError(f"unknown levels {sorted(extra)} for n={self.n}")
        if min(p.values()) < -1e-15:
            raise ValidationError("weights must be non-negative")
        object.__setattr__(self, "p", p)

    def __call__(self, S, M) -> float:
        return self.p[(float(S), float(M))]

    def total(self) -> float:
        return sum(w * self.degeneracy(S) for (S, _), w in self.p.items())

    def degeneracy(self, S) -> int:
        return 2 if self.n == 3 and S == 0.5 else 1

    def normalized(self) -> "SpinSectorWeights":
        z = self.total()
        return SpinSectorWeights(self.n, {k: v / z for k, v in self.p.items()})


def random_weights(n: int, rng) -> SpinSectorWeights:
    raw = rng.exponential(size=len(_LEVELS[n])) * (rng.random(len(_LEVELS[n])) < 0.8)
    if not raw.any():
        raw[0] = 1.0
    return SpinSectorWeights(n, dict(zip(_LEVELS[n], raw))).normalized()


def thermal_weights(spec: ChainSpec, T: float) -> SpinSectorWeights:
    """Gibbs weights ``exp(-E^S_M / T) / Z`` of a two- or three-spin system."""
    if spec.n not in (2, 3):
        raise ValidationError("thermal weights need n = 2 or 3")
    if not T > 0:
        raise DomainError("temperature must be positive")
    levels = [(S, M, g) for S, M, g in total_spin_levels(spec)]
    E = np.array([total_spin_energy(spec, S, M) for S, M, _ in levels])
    w = np.exp(-(E - E.min()) / T)
    g = np.array([lv[2] for lv in levels])
    w = w / np.dot(w, g)
    return SpinSectorWeights(spec.n, {(S, M): wi for (S, M, _), wi in zip(levels, w)})


def _dicke(n: int, M: float) -> np.ndarray:
    states = np.arange(1 << n)
    v = (magnetization(states, n) == M).astype(float)
    return v / np.linalg.norm(v)


def weights_to_density(p: SpinSectorWeights) -> np.ndarray:
    """Matrix of ``sum p^S_M P^S_M`` in the computational basis.

    The maximal-spin projectors are symmetric (Dicke) states; the lower spin
    projector in each M sector is its orthogonal complement there.
    """
    n = p.n
    mags = magnetization(np.arange(1 << n), n)
    rho = np.zeros((1 << n, 1 << n))
    for (S, M), w in p.p.items():
        dk = _dicke(n, M)
        proj = np.outer(dk, dk)
        if S != n / 2:
            proj = np.diag((mags == M).astype(float)) - proj
        rho += w * proj
    return rho


# ---------------------------------------------------------------- two spins


def two_qubit_negativity(p: SpinSectorWeights) -> float:
    p11, p10, p1m, p00 = p(1, 1), p(1, 0), p(1, -1), p(0, 0)
    return 0.5 * max(math.hypot(p10 - p00, p11 - p1m) - p11 - p1m, 0.0)


def two_qubit_entangled(p: SpinSectorWeights) -> bool:
    return abs(p(1, 0) - p(0, 0)) > 2 * math.sqrt(p(1, 1) * p(1, -1))


def border_n2(t: float) -> float:
    """Largest anisotropy with thermal two-spin entanglement at reduced temperature t."""
    _check_t(t)
    return 1 - 2 * t * (math.log(2) - math.log(-math.expm1(-1 / t)))


# -------------------------------------------------------------- three spins


def three_qubit_global_negativity(p: SpinSectorWeights) -> float:
    total = 0.0
    for nu in (1, -1):
        a = 3 * p(1.5, -1.5 * nu)
        b = 2 * p(1.5, 0.5 * nu) + p(0.5, 0.5 * nu)
        c = p(1.5, -0.5 * nu) - p(0.5, -0.5 * nu)
        total += max(math.sqrt((a - b) ** 2 + 8 * c * c) - a - b, 0.0)
    return total / 6


def three_qubit_global_condition(p: SpinSectorWeights) -> bool:
    for nu in (1, -1):
        lhs = abs(p(1.5, 0.5 * nu) - p(0.5, 0.5 * nu))
        rhs = math.sqrt(3 * p(1.5, 1.5 * nu) * (p(1.5, -0.5 * nu) + p(0.5, -0.5 * nu) / 2))
        if lhs > rhs:
            return True
    return False


def reduce_weights_3to2(p3: SpinSectorWeights) -> SpinSectorWeights:
    """Two-spin weights of the pair density left after tracing one spin."""
    if p3.n != 3:
        raise ValidationError("expected three-spin weights")
    p00 = p3(0.5, 0.5) + p3(0.5, -0.5)
    out = {(0.0, 0.0): p00,
           (1.0, 0.0): (2 * (p3(1.5, 0.5) + p3(1.5, -0.5)) + p00) / 3}
    for s in (1, -1):
        out[(1.0, float(s))] = (3 * p3(1.5, 1.5 * s) + p3(1.5, 0.5 * s) + 2 * p3(0.5, 0.5 * s)) / 3
    return SpinSectorWeights(2, out)


def pair_condition_n3(p3: SpinSectorWeights) -> bool:
    lhs = abs(sum(p3(1.5, 0.5 * nu) - p3(0.5, 0.5 * nu) for nu in (1, -1)))
    rhs = math.prod(math.sqrt(3 * p3(1.5, 1.5 * nu) + p3(1.5, 0.5 * nu) + 2 * p3(0.5, 0.5 * nu))
                    for nu in (1, -1))
    return lhs > rhs


def border_n3_global(t: float, v_sign: int = 1) -> float:
    """Largest anisotropy with one-versus-two entanglement in the 3-ring."""
    _check_t(t)
    a = math.exp(-1.5 / t)
    one_minus = -math.expm1(-1.5 / t)
    if v_sign > 0:
        return 1 - t * math.log(3 * (2 + a) / (2 * one_minus ** 2))
    return 0.5 - t * math.log(3 * (1 + 2 * a) / (2 * one_minus ** 2))


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - math.log(2)


def _pair_gap(t: float, b_bar: float, v_sign: int) -> tuple[float, float]:
    """``(h, log eta)`` with ``eta * h`` the denominator of the pair border.

    Written in terms of ``u = 1 / eta`` to stay finite when ``b_bar / t`` is large.
    """
    a = math.exp(-1.5 / t)
    one_minus = -math.expm1(-1.5 / t)
    g = 1 + 2 * a if v_sign > 0 else 2 + a
    x = b_bar / t
    u = 2 * math.exp(-x) / (1 + math.exp(-2 * x))
    root = math.sqrt(g * g * (1 - u * u) + 2 * (u + u * u) * one_minus ** 2)
    h = (2 * u * (1 + u) * one_minus ** 2 - g * g * u * u) / (root + g)
    return h, _log_cosh(x)


def border_n3_pair(t: float, b_bar: float = 0.0, v_sign: int = 1):
    """Largest anisotropy with pairwise entanglement in the 3-ring, or None.

    None means no pair entanglement at this temperature for any anisotropy.
    For v < 0 the offset is 1/2 rather than 1, as for the global border.
    """
    _check_t(t)
    h, log_eta = _pair_gap(t, abs(b_bar), v_sign)
    if h <= 0:
        return None
    offset = 1.0 if v_sign > 0 else 0.5
    return offset - t * (math.log(3) - log_eta - math.log(h))


def pair_saturation_temperature(b_bar: float = 0.0, v_sign: int = 1,
                                t_lo: float = 1e-2, t_hi: float = 1e3) -> float:
    """Temperature where the pair border's denominator vanishes (its Delta -> -inf limit)."""
    def f(t):
        return _pair_gap(t, abs(b_bar), v_sign)[0]

    grid = np.geomspace(t_lo, t_hi, 400)
    vals = np.array([f(t) for t in grid])
    sign_change = np.flatnonzero((vals[:-1] > 0) & (vals[1:] <= 0))
    if not len(sign_change):
        raise ScanRangeError(f"no saturation temperature bracketed for b_bar={b_bar}, v_sign={v_sign}")
    i = sign_change[-1]
    return scipy.optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14)


def _check_t(t: float) -> None:
    if not t > 0:
        raise DomainError(f"reduced temperature must be positive, got {t!r}")


# ------------------------------------------------------- four-spin M=0 state


@dataclass(frozen=True)
class RingM0State:
    """Translation-invariant M=0 state of the 4-ring: amplitude ``alpha`` on the
    four ``uudd`` rotations, ``beta`` on the two Neel states."""

    delta: float
    alpha: float
    beta: float
    negativities: dict

    @property
    def energy(self) -> float:
        """Energy at |v| = 1, b = 0 (the state is the M=0 ground state for v > 0)."""
        return -self.beta / self.alpha

    def vector(self) -> np.ndarray:
        psi = np.zeros(16)
        for s in (0b1100, 0b1001, 0b0011, 0b0110):
            psi[s] = self.alpha
        for s in (0b1010, 0b0101):
            psi[s] = self.beta
        return psi


def m0_ring_state(delta: float) -> RingM0State:
    ratio = (math.sqrt(8 + delta * delta) - delta) / 2
    alpha = 1 / math.sqrt(4 + 2 * ratio * ratio)
    beta = ratio * alpha
    n_ac = beta * (4 * alpha + beta)
    negs = {
        "a-bcd": 0.5,
        "ac-bd": n_ac,
        "ab-cd": n_ac if delta < 1 else 6 * alpha ** 2 - beta ** 2,
        "a-b": alpha * (2 * beta - alpha) if delta < 3.5 else 0.0,
        "a-c": 2 * alpha ** 2 - beta ** 2 if delta > 0 else 0.0,
    }
    return RingM0State(delta, alpha, beta, negs)
