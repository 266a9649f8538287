"""Floquet maps, parametric instability, and thermalization diagnostics
for a pair of linearly coupled oscillators with square-wave frequency
modulation."""

from .classical import (
    DEFAULT_START,
    DenseOrbit,
    PhasePoint,
    StroboscopicOrbit,
    dense_orbit,
    stroboscopic_orbit,
)
from .floquet import (
    FloquetData,
    InvalidRange,
    Regime,
    ScanPoint,
    SystemParams,
    analyze,
    floquet_matrix,
    instability_condition_single,
    single_oscillator_exponent,
    single_oscillator_floquet,
    stability_scan,
    stiffness_matrix,
)
from .gaussian import (
    BetaEstimate,
    GaussianPureState,
    NonNormalizable,
    NotThermalForm,
    ReducedGaussianDM,
    RiccatiPair,
    SingularLinearization,
    StepRejected,
    TemperatureUndefined,
    effective_beta,
    evolve_exact,
    evolve_rk4,
    initial_state,
    linear_entropy,
    log_normalization,
    norm_quadrature_gap,
    reduced_density_matrix,
)
from .linalg import (
    SYMPLECTIC_FORM,
    NonSymplecticInput,
    hamiltonian_exponential,
    sym2_eigen,
    symplectic_defect,
    symplectic_eigenvalues,
)
from .moments import (
    DegenerateEigenvector,
    GrowthFit,
    InsufficientData,
    LogScaled,
    MomentRecord,
    NotUnstable,
    OtocRecord,
    effective_frequency,
    fit_growth_rate,
    moment_ratio,
    otoc_series,
    second_moments,
)
from .presets import PRESETS, get_preset

__all__ = [
    "BetaEstimate",
    "DEFAULT_START",
    "DegenerateEigenvector",
    "DenseOrbit",
    "FloquetData",
    "GaussianPureState",
    "GrowthFit",
    "InsufficientData",
    "InvalidRange",
    "LogScaled",
    "MomentRecord",
    "NonNormalizable",
    "NonSymplecticInput",
    "NotThermalForm",
    "NotUnstable",
    "OtocRecord",
    "PRESETS",
    "PhasePoint",
    "ReducedGaussianDM",
    "Regime",
    "RiccatiPair",
    "SYMPLECTIC_FORM",
    "ScanPoint",
    "SingularLinearization",
    "StepRejected",
    "StroboscopicOrbit",
    "SystemParams",
    "TemperatureUndefined",
    "analyze",
    "dense_orbit",
    "effective_beta",
    "effective_frequency",
    "evolve_exact",
    "evolve_rk4",
    "fit_growth_rate",
    "floquet_matrix",
    "get_preset",
    "hamiltonian_exponential",
    "initial_state",
    "instability_condition_single",
    "linear_entropy",
    "log_normalization",
    "moment_ratio",
    "norm_quadrature_gap",
    "otoc_series",
    "reduced_density_matrix",
    "second_moments",
    "single_oscillator_exponent",
    "single_oscillator_floquet",
    "stability_scan",
    "stiffness_matrix",
    "stroboscopic_orbit",
    "sym2_eigen",
    "symplectic_defect",
    "symplectic_eigenvalues",
]

__version__ = "0.1.0"
