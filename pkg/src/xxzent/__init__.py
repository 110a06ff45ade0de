"""Thermal entanglement of XXZ spin rings: exact diagonalization, partial-transpose
negativities, limit temperatures and closed-form cross-checks for small systems."""

__version__ = "0.1.0"

from .entanglement import (EPS_NEG, Bipartition, NegativityReport, negativity, partial_trace,
                           partial_transpose, pure_negativity, separability_ball_test, sf_entropy)
from .errors import (CapacityError, DomainError, ScanRangeError, UnsupportedCaseError, ValidationError,
                     XXZError)
from .limits import (LimitTemperature, NegativityProfile, all_global_bipartitions, all_reduced_bipartitions,
                     border_curve, field_independence_report, limit_temperature, negativity_profile)
from .spectral import decompose, eigendecompose, partition_function, thermal_state, zero_T_limit
from .spinchain import ChainSpec, build_hamiltonian, ground_manifold, total_spin_energy, transition_line

__all__ = [
    "EPS_NEG", "Bipartition", "NegativityReport", "negativity", "partial_trace", "partial_transpose",
    "pure_negativity", "separability_ball_test", "sf_entropy", "CapacityError", "DomainError",
    "ScanRangeError", "UnsupportedCaseError", "ValidationError", "XXZError", "LimitTemperature",
    "NegativityProfile", "all_global_bipartitions", "all_reduced_bipartitions", "border_curve",
    "field_independence_report", "limit_temperature", "negativity_profile", "decompose",
    "eigendecompose", "partition_function", "thermal_state", "zero_T_limit", "ChainSpec",
    "build_hamiltonian", "ground_manifold", "total_spin_energy", "transition_line",
]
