"""Partial trace, partial transpose, negativity and related mixedness measures.

Sites are addressed by bitmask (bit ``i`` = site ``i``), consistent with the
basis convention of :mod:`xxzent.spinchain`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import ValidationError
from .spinchain import SITE_NAMES, ChainSpec, build_hamiltonian, total_spin_operator_sz

EPS_NEG = 1e-10


def _sites(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _letters(mask: int) -> str:
    return "".join(SITE_NAMES[i] for i in _sites(mask))


@dataclass(frozen=True)
class Bipartition:
    """Split of the sites in ``keep`` into ``part_a`` and ``keep & ~part_a``.

    When ``keep`` covers all ``n`` sites the split is global; otherwise the
    remaining sites are traced out first.  ``part_a`` always holds the lowest
    kept site.
    """

    n: int
    part_a: int
    keep: int = -1

    def __post_init__(self):
        full = (1 << self.n) - 1
        keep = full if self.keep == -1 else self.keep
        object.__setattr__(self, "keep", keep)
        if not 1 <= self.n <= len(SITE_NAMES):
            raise ValidationError(f"site count {self.n} out of range")
        if keep & ~full or self.part_a & ~keep:
            raise ValidationError("bipartition refers to sites outside the system")
        rest = keep & ~self.part_a
        if not self.part_a or not rest:
            raise ValidationError("both sides of a bipartition must be non-empty")
        if not self.part_a & (keep & -keep):
            object.__setattr__(self, "part_a", rest)

    @classmethod
    def parse(cls, label: str, n: int) -> "Bipartition":
        """Parse ``"ab-cd"``; ``"a-*"`` or ``"a-rest"`` means "a versus all others"."""
        label = label.strip().lower()
        groups = label.split("-")
        if len(groups) != 2 or not all(groups):
            raise ValidationError(f"bad partition label {label!r}: need two groups joined by '-'")
        masks = []
        for g in groups:
            if g in ("*", "rest"):
                masks.append(None)
                continue
            mask = 0
            for ch in g:
                k = SITE_NAMES.find(ch)
                if k < 0:
                    raise ValidationError(f"bad site name {ch!r} in {label!r}")
                if k >= n:
                    raise ValidationError(f"site {ch!r} in {label!r} out of range for n={n}")
                if mask >> k & 1:
                    raise ValidationError(f"site {ch!r} repeated in {label!r}")
                mask |= 1 << k
            masks.append(mask)
        full = (1 << n) - 1
        a, b = masks
        if a is None and b is None:
            raise ValidationError("only one group may be '*'")
        if a is None:
            a = full & ~b
        if b is None:
            b = full & ~a
        if a & b:
            raise ValidationError(f"groups of {label!r} overlap")
        return cls(n, a, a | b)

    @property
    def part_b(self) -> int:
        return self.keep & ~self.part_a

    @property
    def is_global(self) -> bool:
        return self.keep == (1 << self.n) - 1

    @property
    def label(self) -> str:
        return f"{_letters(self.part_a)}-{_letters(self.part_b)}"

    def reduced(self) -> "Bipartition":
        """The same split expressed on the kept sites only, renumbered from 0."""
        kept = _sites(self.keep)
        a = sum(1 << k for k, s in enumerate(kept) if self.part_a >> s & 1)
        return Bipartition(len(kept), a)

    def __str__(self):
        return self.label


@dataclass
class NegativityReport:
    value: float
    negative_eigenvalue_count: int
    bipartition: Bipartition
    metadata: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.negative_eigenvalue_count


# ----------------------------------------------------------------- helpers


def _nsites(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = d.bit_length() - 1
    if rho.ndim != 2 or rho.shape != (d, d) or (1 << n) != d or n < 1:
        raise ValidationError(f"expected a 2^n x 2^n matrix, got shape {rho.shape}")
    return n


def _site_tensor(rho: np.ndarray, n: int) -> np.ndarray:
    # axis k (row) and n + k (column) belong to site k
    t = rho.reshape((2,) * (2 * n))
    order = list(range(n - 1, -1, -1)) + list(range(2 * n - 1, n - 1, -1))
    return t.transpose(order)


def _from_site_tensor(t: np.ndarray, n: int) -> np.ndarray:
    order = list(range(n - 1, -1, -1)) + list(range(2 * n - 1, n - 1, -1))
    return t.transpose(order).reshape(1 << n, 1 << n)


# -------------------------------------------------------------- operations


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced density matrix of the sites in bitmask ``keep`` (order preserved)."""
    rho = np.asarray(rho)
    n = _nsites(rho)
    full = (1 << n) - 1
    if keep <= 0 or keep & ~full:
        raise ValidationError(f"invalid keep mask {keep!r} for n={n}")
    if keep == full:
        return rho.copy()
    t = _site_tensor(rho, n)
    rows = list(range(n))
    cols = [i if not keep >> i & 1 else n + i for i in range(n)]
    kept = _sites(keep)
    out = np.einsum(t, rows + cols, kept + [n + i for i in kept], optimize=False)
    return _from_site_tensor(out, len(kept))


def partial_transpose(rho, part_a) -> np.ndarray:
    """Transpose the indices of the sites in ``part_a`` (bitmask or Bipartition)."""
    rho = np.asarray(rho)
    n = _nsites(rho)
    mask = _mask_for(part_a, n)
    t = _site_tensor(rho, n)
    axes = list(range(2 * n))
    for i in _sites(mask):
        axes[i], axes[n + i] = n + i, i
    return _from_site_tensor(t.transpose(axes), n).copy()


def _mask_for(part, n: int) -> int:
    if isinstance(part, Bipartition):
        if part.n != n or not part.is_global:
            raise ValidationError(f"bipartition {part} does not match a {n}-site state")
        return part.part_a
    mask = int(part)
    if mask <= 0 or mask >= (1 << n) or mask & ~((1 << n) - 1):
        raise ValidationError(f"invalid site mask {mask} for n={n}")
    return mask


@lru_cache(maxsize=512)
def _pt_blocks(n: int, mask: int) -> tuple[np.ndarray, ...]:
    """Index groups of constant ``M_B - M_A``; the transpose of an S_z-symmetric
    matrix is block diagonal in them."""
    states = np.arange(1 << n)
    q = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        up = 1 - 2 * ((states >> i) & 1)  # 2 m_i
        q += -up if mask >> i & 1 else up
    return tuple(np.flatnonzero(q == v) for v in np.unique(q))


def _commutes_with_sz(rho: np.ndarray, n: int) -> bool:
    mags = total_spin_operator_sz(n)
    off = mags[:, None] != mags[None, :]
    scale = max(np.max(np.abs(rho)), 1e-300)
    return not np.any(np.abs(rho[off]) > 1e-14 * scale)


def _frame_scale(rho: np.ndarray, n: int, field_over_T: float):
    """Row factors ``s`` with ``s_r^2 ~ exp(field_over_T * M_r)``, log-centered.

    Returns ``(s, trace)`` where ``trace = sum_r rho_rr s_r^2``.
    """
    mags = total_spin_operator_sz(n)
    diag = np.real(np.diagonal(rho))
    with np.errstate(divide="ignore"):
        logs = field_over_T * mags + np.log(np.where(diag > 0, diag, np.nan))
    c = np.nanmax(logs) if np.any(diag > 0) else 0.0
    # rows whose diagonal underflowed hold only zeros; cap keeps 0 * s finite
    s = np.exp(np.minimum(0.5 * (field_over_T * mags - c), 150.0))
    return s, float(np.sum(diag * s * s))


def pt_spectrum(rho, part_a, method: str = "auto", field_over_T: float = 0.0) -> np.ndarray:
    """Eigenvalues of the partial transpose, ascending.

    ``method="blocked"`` exploits the S_z structure and assumes it;
    ``"dense"`` diagonalizes the full matrix; ``"auto"`` checks first.

    With ``field_over_T = b / T`` the transpose is first mapped to the
    field-free frame, ``F^-1 rho^t F^-1 / trace`` with ``F = exp(-b S_z / 2T)``.
    That congruence keeps the signs of all eigenvalues and undoes the
    exp(-b M / T) grading of a Gibbs state of ``b S_z + V`` with ``[V, S_z] = 0``,
    so tiny-but-nonzero negativities at strong field stay resolvable.
    """
    rho = np.asarray(rho)
    n = _nsites(rho)
    mask = _mask_for(part_a, n)
    if method == "auto":
        method = "blocked" if _commutes_with_sz(rho, n) else "dense"
    s, tr = _frame_scale(rho, n, field_over_T) if field_over_T else (None, 1.0)
    if method == "dense":
        pt = partial_transpose(rho, mask)
        if s is not None:
            pt = pt * s[:, None] * s[None, :] / tr
        return np.linalg.eigvalsh(pt)
    if method != "blocked":
        raise ValidationError(f"unknown method {method!r}")
    vals = []
    for idx in _pt_blocks(n, mask):
        r, c = idx[:, None], idx[None, :]
        block = rho[(r & ~mask) | (c & mask), (c & ~mask) | (r & mask)]
        if s is not None:
            block = block * s[r] * s[c] / tr
        vals.append(np.linalg.eigvalsh(block))
    return np.sort(np.concatenate(vals))


def pt_sign_test(rho, part: Bipartition, field_over_T: float = 0.0,
                 eps_neg: float = EPS_NEG, method: str = "auto") -> tuple[bool, int]:
    """``(entangled, k)`` from the partial transpose in the field-free frame.

    For global splits the sign pattern of the transpose does not depend on
    the uniform field, so the test uses the frame where the absolute
    threshold ``eps_neg`` means the same thing at every ``b``.  Reduced
    splits trace out the other sites first; the congruence by the kept
    sites' part of ``F`` still preserves signs, although part of the
    field grading survives the trace.
    """
    rho = np.asarray(rho)
    if not part.is_global:
        rho = partial_trace(rho, part.keep)
        part = part.reduced()
    lam = pt_spectrum(rho, part.part_a, method, field_over_T)
    return float(-lam[lam < 0].sum()) > eps_neg, int(np.count_nonzero(lam < -eps_neg))


def negativity(rho, part: Bipartition, eps_neg: float = EPS_NEG, method: str = "auto",
               **metadata) -> NegativityReport:
    """Sum of |negative eigenvalues| of the partial transpose over ``part``.

    Reduced splits trace out the sites outside ``part.keep`` first.
    """
    rho = np.asarray(rho)
    n = _nsites(rho)
    if part.n != n:
        raise ValidationError(f"bipartition {part} is for n={part.n}, state has n={n}")
    if not part.is_global:
        rho = partial_trace(rho, part.keep)
        sub = part.reduced()
    else:
        sub = part
    lam = pt_spectrum(rho, sub.part_a, method)
    value = float(-lam[lam < 0].sum()) + 0.0  # avoid -0.0
    return NegativityReport(value, int(np.count_nonzero(lam < -eps_neg)), part, metadata)


def schmidt_coefficients(psi, part_a: int) -> np.ndarray:
    """Squared Schmidt coefficients of ``psi`` across ``part_a``, descending."""
    psi = np.asarray(psi)
    d = psi.shape[0]
    n = d.bit_length() - 1
    if psi.ndim != 1 or (1 << n) != d:
        raise ValidationError("state vector must have length 2^n")
    a_sites = _sites(part_a)
    b_sites = [i for i in range(n) if i not in a_sites]
    t = psi.reshape((2,) * n).transpose(list(range(n - 1, -1, -1)))
    mat = t.transpose(a_sites + b_sites).reshape(1 << len(a_sites), -1)
    return np.linalg.svd(mat, compute_uv=False) ** 2


def pure_negativity(psi, part) -> float:
    """Negativity of a pure state from its Schmidt spectrum."""
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-10:
        raise ValidationError(f"state is not normalized (norm {norm:.12g})")
    n = psi.shape[0].bit_length() - 1
    lam = schmidt_coefficients(psi, _mask_for(part, n))
    return pure_negativity_from_spectrum(lam)


def pure_negativity_from_spectrum(lam) -> float:
    s = np.sqrt(np.clip(np.asarray(lam, dtype=float), 0, None)).sum()
    return 0.5 * (s * s - 1)


def sf_entropy(rho, tol: float = 1e-10) -> float:
    """Tr(sqrt(rho) - rho)."""
    lam = np.linalg.eigvalsh(np.asarray(rho))
    if lam[0] < -tol:
        raise ValidationError(f"matrix has negative eigenvalue {lam[0]:.3g}")
    lam = np.clip(lam, 0, None)
    return float(np.sum(np.sqrt(lam) - lam))


def separability_ball_test(rho) -> bool:
    """True when ``rho`` lies in the ball around I/d in which every state is separable."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    dev = rho - np.eye(d) / d
    dist2 = float(np.real(np.sum(dev * dev.conj())))
    return dist2 <= 1.0 / (d * (d - 1))


def pt_field_factorization_check(spec: ChainSpec, part, T: float) -> float:
    """Relative max deviation between both sides of the field factorization
    ``D^t(b) = exp(-b S_z / 2T) D^t(0) exp(-b S_z / 2T)`` with ``D(b) = exp(-H/T)``."""
    mask = _mask_for(part, spec.n)
    sz = total_spin_operator_sz(spec.n)
    lhs = partial_transpose(scipy.linalg.expm(-build_hamiltonian(spec) / T), mask)
    d0 = partial_transpose(scipy.linalg.expm(-build_hamiltonian(spec.with_field(0.0)) / T), mask)
    f = np.exp(-spec.b * sz / (2 * T))
    rhs = f[:, None] * d0 * f[None, :]
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
