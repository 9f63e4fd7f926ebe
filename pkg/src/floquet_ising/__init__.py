"""Driven transverse-field Ising chain: Bogoliubov-de Gennes dynamics,
Floquet analysis and free-fermion entanglement entropy.

The package is organized in five layers:

- :mod:`floquet_ising.model`: chain and drive parameters, momentum grids,
  dispersion, ground-state pair amplitudes, real-space quadratic Hamiltonian.
- :mod:`floquet_ising.bdg`: RK4 time evolution of the 2x2 momentum-mode
  equations and of the 2L x 2L real-space Bogoliubov frame.
- :mod:`floquet_ising.floquet`: one-period propagators, quasi-energies,
  Floquet modes, overlap amplitudes and generalized-Gibbs data.
- :mod:`floquet_ising.corr`: Majorana correlation matrices (generic
  real-space, block-Toeplitz, asymptotic) and the k-integration engine.
- :mod:`floquet_ising.entropy`: subchain entanglement entropy and the
  closed-form asymptotic entropy density.

:mod:`floquet_ising.cli` drives the reproducible experiments
(``floquet-ising <experiment> ...``).
"""

from .model import (
    Boundary,
    ChainSpec,
    DriveParams,
    KGrid,
    NambuAmplitude,
    build_k_grid,
    build_real_space_hamiltonian,
    drive_field,
    ground_state_amplitudes,
    static_dispersion,
)
from .bdg import (
    BogoliubovFrame,
    evolve_k_mode,
    evolve_real_space,
    ground_state_bogoliubov,
)
from .floquet import (
    FloquetAnalysis,
    FloquetMode,
    GGEData,
    analyze_grid,
    floquet_decompose,
    gge_lambda,
    overlaps,
    period_propagator,
    periodic_components,
)
from .corr import (
    MajoranaCorrelation,
    ModeCorrelators,
    asymptotic_correlators_k,
    asymptotic_toeplitz,
    correlation_generic,
    correlators_k,
    k_integral,
    toeplitz_blocks,
)
from .entropy import (
    EntropyTrace,
    asymptotic_entropy_density,
    binary_entropy_H,
    correlation_spectrum,
    gge_entropy_density,
    quench_limit_check,
    subchain_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "ChainSpec",
    "DriveParams",
    "KGrid",
    "NambuAmplitude",
    "BogoliubovFrame",
    "FloquetAnalysis",
    "FloquetMode",
    "GGEData",
    "MajoranaCorrelation",
    "ModeCorrelators",
    "EntropyTrace",
    "analyze_grid",
    "asymptotic_correlators_k",
    "asymptotic_entropy_density",
    "asymptotic_toeplitz",
    "binary_entropy_H",
    "build_k_grid",
    "build_real_space_hamiltonian",
    "correlation_generic",
    "correlation_spectrum",
    "correlators_k",
    "drive_field",
    "evolve_k_mode",
    "evolve_real_space",
    "floquet_decompose",
    "gge_entropy_density",
    "gge_lambda",
    "ground_state_amplitudes",
    "ground_state_bogoliubov",
    "k_integral",
    "overlaps",
    "period_propagator",
    "periodic_components",
    "quench_limit_check",
    "static_dispersion",
    "subchain_entropy",
    "toeplitz_blocks",
]
