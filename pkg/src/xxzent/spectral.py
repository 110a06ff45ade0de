"""Sector-wise eigendecomposition and Gibbs states."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ValidationError
from .spinchain import ChainSpec, hamiltonian_blocks, sector_index


@dataclass(frozen=True)
class Sector:
    M: float | None  # None when the input had no S_z block structure
    indices: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs grouped by magnetization sector, ascending within each."""

    dim: int
    sectors: tuple[Sector, ...]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def energies(self) -> np.ndarray:
        return np.concatenate([s.energies for s in self.sectors])

    @property
    def e_min(self) -> float:
        return float(min(s.energies[0] for s in self.sectors))

    def dense_vectors(self) -> np.ndarray:
        """Full ``d x d`` eigenvector matrix, columns ordered as ``energies``."""
        V = np.zeros((self.dim, self.dim))
        col = 0
        for s in self.sectors:
            k = len(s.energies)
            V[np.ix_(s.indices, np.arange(col, col + k))] = s.vectors
            col += k
        return V

    def reconstruct(self) -> np.ndarray:
        H = np.zeros((self.dim, self.dim))
        for s in self.sectors:
            H[np.ix_(s.indices, s.indices)] = (s.vectors * s.energies) @ s.vectors.T
        return H

    def shifted(self, field: float) -> "SpectralDecomposition":
        """Decomposition of ``H + field * S_z``; eigenvectors are unchanged."""
        if any(s.M is None for s in self.sectors):
            raise ValidationError("field shift needs a sector-resolved decomposition")
        return SpectralDecomposition(self.dim, tuple(
            Sector(s.M, s.indices, s.energies + field * s.M, s.vectors) for s in self.sectors))

    def ground(self, tol: float = 1e-10):
        scale = max(1.0, float(np.max(np.abs(self.energies))))
        e0 = self.e_min
        vecs, mags = [], []
        for s in self.sectors:
            for k in np.flatnonzero(s.energies - e0 <= tol * scale):
                v = np.zeros(self.dim)
                v[s.indices] = s.vectors[:, k]
                vecs.append(v)
                mags.append(s.M)
        return e0, np.column_stack(vecs), mags


def _is_block_diagonal(H: np.ndarray, sectors: dict) -> bool:
    label = np.empty(len(H))
    for M, idx in sectors.items():
        label[idx] = M
    off = label[:, None] != label[None, :]
    return not np.any(H[off])


def eigendecompose(H) -> SpectralDecomposition:
    """Hermitian eigendecomposition, per S_z sector when H allows it.

    Inputs without S_z block structure are solved as one block (``M=None``).
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    d = H.shape[0]
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-9:
        raise ValidationError("matrix is not Hermitian")
    if np.iscomplexobj(H):
        if np.max(np.abs(H.imag), initial=0.0) > 1e-12:
            raise ValidationError("complex Hamiltonians are not supported")
        H = H.real
    H = (H + H.T) / 2
    n = d.bit_length() - 1
    if d >= 2 and (1 << n) == d:
        sectors = sector_index(n)
        if _is_block_diagonal(H, sectors):
            out = []
            for M, idx in sectors.items():
                w, V = np.linalg.eigh(H[np.ix_(idx, idx)])
                out.append(Sector(M, idx, w, V))
            return SpectralDecomposition(d, tuple(out))
    w, V = np.linalg.eigh(H)
    return SpectralDecomposition(d, (Sector(None, np.arange(d), w, V),))


@lru_cache(maxsize=128)
def _decompose_zero_field(spec: ChainSpec) -> SpectralDecomposition:
    out = []
    for M, (idx, block) in hamiltonian_blocks(spec).items():
        w, V = np.linalg.eigh(block)
        out.append(Sector(M, idx, w, V))
    return SpectralDecomposition(spec.dim, tuple(out))


def decompose(spec: ChainSpec) -> SpectralDecomposition:
    """Cached decomposition of a chain; specs differing only in b share eigenvectors."""
    base = _decompose_zero_field(spec.with_field(0.0))
    return base.shifted(spec.b) if spec.b else base


def _boltzmann(decomp: SpectralDecomposition, T: float):
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T!r}; use zero_T_limit")
    e0 = decomp.e_min
    return [np.exp(-(s.energies - e0) / T) for s in decomp.sectors], e0


class PartitionFunction(NamedTuple):
    """``Z = reduced * exp(-shift / T)`` with ``shift`` the ground energy."""

    reduced: float
    shift: float
    T: float

    @property
    def log(self) -> float:
        return float(np.log(self.reduced) - self.shift / self.T)

    @property
    def value(self) -> float:
        return float(np.exp(self.log))


def partition_function(decomp: SpectralDecomposition, T: float) -> PartitionFunction:
    weights, e0 = _boltzmann(decomp, T)
    return PartitionFunction(float(sum(w.sum() for w in weights)), e0, T)


def _assemble(decomp: SpectralDecomposition, weights) -> np.ndarray:
    rho = np.zeros((decomp.dim, decomp.dim))
    for s, w in zip(decomp.sectors, weights):
        keep = w > 0
        if not keep.any():
            continue
        V = s.vectors[:, keep]
        rho[np.ix_(s.indices, s.indices)] = (V * w[keep]) @ V.T
    return rho


def thermal_state(decomp: SpectralDecomposition, T: float) -> np.ndarray:
    """Normalized Gibbs state ``exp(-H/T) / Z`` as a dense real matrix."""
    weights, _ = _boltzmann(decomp, T)
    z = sum(w.sum() for w in weights)
    return _assemble(decomp, [w / z for w in weights])


def zero_T_limit(decomp: SpectralDecomposition, degeneracy_tol: float = 1e-10) -> np.ndarray:
    """Equal-weight mixture over the (possibly degenerate) ground manifold."""
    scale = max(1.0, float(np.max(np.abs(decomp.energies))))
    e0 = decomp.e_min
    weights = [(s.energies - e0 <= degeneracy_tol * scale).astype(float) for s in decomp.sectors]
    g = sum(w.sum() for w in weights)
    return _assemble(decomp, [w / g for w in weights])


def check_density_matrix(rho, atol_trace=1e-10, atol_herm=1e-12, atol_psd=1e-10) -> None:
    """Raise ValidationError unless ``rho`` is a unit-trace PSD Hermitian matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    if abs(np.trace(rho) - 1) > atol_trace:
        raise ValidationError(f"trace {np.trace(rho).real:.3g} != 1")
    if np.max(np.abs(rho - rho.conj().T)) > atol_herm:
        raise ValidationError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho)[0] < -atol_psd:
        raise ValidationError("density matrix has a negative eigenvalue")
