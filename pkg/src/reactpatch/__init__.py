"""Reactive capacitances, monopole corrections and small-patch asymptotics for
diffusion to reactive patches on the unit sphere."""

from .disk_steklov import (
    CapacitanceModel,
    DiskSteklovSpectrum,
    cached_spectrum,
    capacitance,
    capacitance_derivative,
    charge_density,
    monopole_E,
    monopole_E_heuristic,
    neumann_zeros,
    solve_disk_spectrum,
)
from .errors import ConfigError, NumericalError, ReactPatchError
from .expansions import (
    ExpansionResult,
    k_eff,
    mfrt_coeffs,
    mfrt_moderate_reactivity,
    principal_eigenvalue,
    splitting_coeffs,
)
from .oracle import OracleResult, sn_oracle
from .sphere_geometry import PatchLayout, green_matrix, green_s
from .steklov_asym import EigenBranch, sdn_eigenvalues, sn_near_resonant, sn_nonresonant

__version__ = "0.1.0"

__all__ = [
    "CapacitanceModel",
    "DiskSteklovSpectrum",
    "cached_spectrum",
    "capacitance",
    "capacitance_derivative",
    "charge_density",
    "monopole_E",
    "monopole_E_heuristic",
    "neumann_zeros",
    "solve_disk_spectrum",
    "ConfigError",
    "NumericalError",
    "ReactPatchError",
    "ExpansionResult",
    "k_eff",
    "mfrt_coeffs",
    "mfrt_moderate_reactivity",
    "principal_eigenvalue",
    "splitting_coeffs",
    "OracleResult",
    "sn_oracle",
    "PatchLayout",
    "green_matrix",
    "green_s",
    "EigenBranch",
    "sdn_eigenvalues",
    "sn_near_resonant",
    "sn_nonresonant",
]
