"""XXZ Hamiltonians on small spin-1/2 rings and their magnetization sectors.

Basis convention: a basis index is an ``n``-bit integer, bit ``i`` belongs to
site ``i`` (site ``a`` is bit 0), and a 0 bit means spin up (m = +1/2).  The
magnetization of a basis state is therefore ``(n - 2 * popcount) / 2``.

The Hamiltonian is

    H = b S_z - sum_{(i,j) in edges} [v_x (s_x s_x + s_y s_y) + v_z s_z s_z]

so a flip of an antiparallel pair on an edge has amplitude ``-v_x / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError, UnsupportedCaseError, ValidationError

MAX_SITES = 12
TOPOLOGIES = ("cyclic-nn", "fully-connected", "single-pair")
SITE_NAMES = "abcdefghijkl"


@dataclass(frozen=True)
class ChainSpec:
    """Physical model: site count, coupling topology, couplings and field."""

    n: int
    topology: str = "cyclic-nn"
    v_x: float = 1.0
    v_z: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValidationError(f"need at least two sites, got n={self.n!r}")
        if self.n > MAX_SITES:
            raise CapacityError(f"n={self.n} exceeds the dense limit of {MAX_SITES} sites")
        if self.topology not in TOPOLOGIES:
            raise ValidationError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.topology == "single-pair" and self.n != 2:
            raise ValidationError("single-pair topology requires n = 2")
        for name in ("v_x", "v_z", "b"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @classmethod
    def from_reduced(cls, n, delta, b_bar=0.0, v_sign=1, topology="cyclic-nn"):
        """Chain in reduced units: |v_x| = 1, v_z = delta, b = b_bar."""
        if v_sign not in (1, -1):
            raise ValidationError("v_sign must be +1 or -1")
        return cls(n=n, topology=topology, v_x=float(v_sign), v_z=float(delta), b=float(b_bar))

    @property
    def delta(self) -> float:
        if self.v_x == 0:
            raise DomainError("anisotropy undefined for v_x = 0")
        return self.v_z / abs(self.v_x)

    @property
    def b_bar(self) -> float:
        if self.v_x == 0:
            raise DomainError("reduced field undefined for v_x = 0")
        return abs(self.b / self.v_x)

    @property
    def v_sign(self) -> int:
        return 1 if self.v_x >= 0 else -1

    @property
    def dim(self) -> int:
        return 1 << self.n

    def with_field(self, b: float) -> "ChainSpec":
        return replace(self, b=float(b))

    def edges(self) -> list[tuple[int, int]]:
        """Coupled site pairs ``(i, j)`` with ``i < j``, each listed once."""
        n = self.n
        if self.topology == "single-pair":
            return [(0, 1)]
        if self.topology == "fully-connected":
            return [(i, j) for i in range(n) for j in range(i + 1, n)]
        # a 2-site ring has a single bond
        return sorted({tuple(sorted((i, (i + 1) % n))) for i in range(n)})


def magnetization(bits, n: int):
    """S_z eigenvalue of basis index (or array of indices) ``bits``."""
    bits = np.asarray(bits)
    pop = np.zeros(bits.shape, dtype=np.int64)
    for i in range(n):
        pop += (bits >> i) & 1
    out = (n - 2 * pop) / 2
    return out if out.ndim else float(out)


def site_spins(n: int) -> np.ndarray:
    """Array ``m[i, s]`` of the local projection of site ``i`` in basis state ``s``."""
    states = np.arange(1 << n)
    return np.array([0.5 - ((states >> i) & 1) for i in range(n)])


def sector_index(n: int) -> dict[float, np.ndarray]:
    """Basis indices grouped by magnetization, keys ascending, indices increasing."""
    mags = magnetization(np.arange(1 << n), n)
    return {float(M): np.flatnonzero(mags == M) for M in np.unique(mags)}


def _diagonal(spec: ChainSpec, m: np.ndarray) -> np.ndarray:
    diag = spec.b * m.sum(axis=0)
    for i, j in spec.edges():
        diag = diag - spec.v_z * m[i] * m[j]
    return diag


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense real matrix of the Hamiltonian in the computational basis."""
    d = spec.dim
    states = np.arange(d)
    H = np.zeros((d, d))
    H[states, states] = _diagonal(spec, site_spins(spec.n))
    if spec.v_x != 0:
        for i, j in spec.edges():
            flip = (1 << i) | (1 << j)
            anti = states[((states >> i) & 1) != ((states >> j) & 1)]
            H[anti, anti ^ flip] += -spec.v_x / 2
    return H


def hamiltonian_blocks(spec: ChainSpec) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Per-sector ``(indices, block)`` pairs, built without the full matrix."""
    m_all = site_spins(spec.n)
    out = {}
    for M, idx in sector_index(spec.n).items():
        pos = {int(s): k for k, s in enumerate(idx)}
        block = np.diag(_diagonal(spec, m_all[:, idx]))
        if spec.v_x != 0:
            for i, j in spec.edges():
                flip = (1 << i) | (1 << j)
                for k, s in enumerate(idx):
                    if ((s >> i) & 1) != ((s >> j) & 1):
                        block[k, pos[int(s ^ flip)]] += -spec.v_x / 2
        out[M] = (idx, block)
    return out


def total_spin_operator_sz(n: int) -> np.ndarray:
    """Diagonal of S_z in the computational basis."""
    return magnetization(np.arange(1 << n), n)


# ---------------------------------------------------------------- total spin


def _spin_form_valid(spec: ChainSpec) -> bool:
    return spec.topology in ("single-pair", "fully-connected") or spec.n <= 3


def spin_multiplicity(n: int, S) -> int:
    """Number of total-spin-S multiplets in n spin-1/2 sites."""
    S = Fraction(S)
    k = Fraction(n, 2) - S
    if k < 0 or k.denominator != 1:
        return 0
    k = int(k)
    return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)


def total_spin_energy(spec: ChainSpec, S, M) -> float:
    """Energy of the level with total spin S and projection M.

    Only valid where H is a function of S^2 and S_z: two sites, the
    three-site ring, or the fully connected cluster of any size.
    """
    if not _spin_form_valid(spec):
        raise UnsupportedCaseError(
            f"total-spin form not valid for {spec.topology} with n={spec.n}")
    S, M = Fraction(S), Fraction(M)
    if (S * 2).denominator != 1 or (M * 2).denominator != 1:
        raise ValidationError("S and M must be half-integers")
    if abs(M) > S or S > Fraction(spec.n, 2) or (S - M).denominator != 1 \
            or spin_multiplicity(spec.n, S) == 0:
        raise ValidationError(f"invalid (S, M) = ({S}, {M}) for n={spec.n}")
    v, vz, n = spec.v_x, spec.v_z, spec.n
    S, M = float(S), float(M)
    e0 = n * (2 * v + vz) / 8
    return spec.b * M - 0.5 * (v * S * (S + 1) + M * M * (vz - v)) + e0


def total_spin_levels(spec: ChainSpec) -> list[tuple[float, float, int]]:
    """All ``(S, M, multiplicity)`` levels of a total-spin-solvable spec."""
    levels = []
    S = Fraction(spec.n, 2)
    while S >= 0:
        g = spin_multiplicity(spec.n, S)
        M = -S
        while M <= S:
            levels.append((float(S), float(M), g))
            M += 1
        S -= 1
    return levels


def total_spin_spectrum(spec: ChainSpec) -> np.ndarray:
    """Sorted eigenvalues with multiplicity from the total-spin formula."""
    out = []
    for S, M, g in total_spin_levels(spec):
        out += [total_spin_energy(spec, S, M)] * g
    return np.sort(np.array(out))


# ------------------------------------------------------------ level crossings


def transition_line(n: int, topology: str, v_sign: int, from_abs_m: float, b_bar: float) -> float:
    """Anisotropy at which the ground state jumps from |M| to |M| + 1.

    Tabulated cases: the last transition into the aligned state (even n,
    or odd n with v > 0), n = 4 (0 -> 1), n = 5 with either coupling sign,
    and n = 3 with v < 0.  Anything else raises UnsupportedCaseError; use
    a numerical crossing search on the Hamiltonian instead.
    """
    if b_bar < 0:
        raise DomainError("b_bar must be non-negative")
    if topology == "fully-connected" and n > 3:
        raise UnsupportedCaseError("no tabulated crossings for the fully connected cluster")
    if topology not in TOPOLOGIES:
        raise ValidationError(f"unknown topology {topology!r}")
    last = n / 2 - 1
    r5 = math.sqrt(5)
    if n == 3 and v_sign < 0 and from_abs_m == 0.5:
        return 0.5 - b_bar
    if n == 5 and v_sign < 0:
        if from_abs_m == 0.5:
            return -(b_bar - 0.5) * (4 * b_bar + 3 + r5) / (4 * b_bar + 1 + r5)
        if from_abs_m == 1.5:
            return (1 + r5) / 4 - b_bar
        raise UnsupportedCaseError(f"no transition from |M|={from_abs_m} for n=5")
    if from_abs_m == last and (n % 2 == 0 or v_sign > 0):
        return 1 - b_bar
    if n == 4 and from_abs_m == 0:
        return (1 - 2 * b_bar - b_bar ** 2) / (1 + b_bar)
    if n == 5 and v_sign > 0 and from_abs_m == 0.5:
        return (1 - b_bar - b_bar ** 2) / (1 + b_bar)
    raise UnsupportedCaseError(
        f"no tabulated transition for n={n}, v_sign={v_sign}, |M|={from_abs_m}")


def ground_manifold(spec: ChainSpec, tol: float = 1e-10):
    """Lowest energy, orthonormal ground vectors and their magnetizations.

    Degeneracy is decided by ``|E - E_min| <= tol * max(1, max|E|)``.
    Returns ``(energy, vectors, mags)`` with ``vectors`` of shape ``(d, g)``.
    """
    from .spectral import decompose

    dec = decompose(spec)
    return dec.ground(tol)
