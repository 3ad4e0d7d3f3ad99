"""Krylov spread complexity under higher-order evolution generators.

The package builds Krylov bases for a family of generators indexed by an
order p and a step dt (p = 1 is the Hamiltonian itself, p = infinity the
exact unitary step), evolves states spectrally, and measures how the
choice of basis changes the spread complexity. A config-driven CLI
(``krylov-lab``) reruns the shipped random-matrix experiments and the
basis non-optimality sweep with full determinism.
"""

from .analysis import (
    BandwidthProfile,
    ProjectedMatrix,
    Theorem1Record,
    Theorem1Report,
    bandwidth_profile,
    project_hamiltonian,
    verify_theorem1,
)
from .dynamics import (
    ComplexityTrace,
    TimeGrid,
    amplitudes,
    chain_ode_integrate,
    complexity_difference,
    evolve,
)
from .ensemble import (
    EnsembleSpec,
    sample_gue,
    spawn_rng,
    uniform_eigenstate_superposition,
)
from .errors import (
    BasisIncompleteError,
    ConfigError,
    DegenerateSpectrumError,
    DegenerateSpectrumWarning,
    EigensolverError,
    EmptyMaskError,
    KrylovLabError,
    NumericError,
    StepSizeError,
)
from .estimator import KrylovComplexity
from .krylov import (
    KrylovBasis,
    build_basis,
    build_generator,
    krylov_sequence,
    lanczos_coefficients,
)
from .linalg import (
    Eigensystem,
    hermitian_eigendecompose,
    matrix_function,
    orthonormalize,
    phase_fix,
    spectral_norm,
)
from .timescales import TimescaleReport, compute_timescales, dyson_term_norm

__version__ = "0.1.0"

__all__ = [
    "BandwidthProfile",
    "BasisIncompleteError",
    "ComplexityTrace",
    "ConfigError",
    "DegenerateSpectrumError",
    "DegenerateSpectrumWarning",
    "EigensolverError",
    "Eigensystem",
    "EmptyMaskError",
    "EnsembleSpec",
    "KrylovBasis",
    "KrylovComplexity",
    "KrylovLabError",
    "NumericError",
    "ProjectedMatrix",
    "StepSizeError",
    "Theorem1Record",
    "Theorem1Report",
    "TimeGrid",
    "TimescaleReport",
    "amplitudes",
    "bandwidth_profile",
    "build_basis",
    "build_generator",
    "chain_ode_integrate",
    "complexity_difference",
    "compute_timescales",
    "dyson_term_norm",
    "evolve",
    "hermitian_eigendecompose",
    "krylov_sequence",
    "lanczos_coefficients",
    "matrix_function",
    "orthonormalize",
    "phase_fix",
    "project_hamiltonian",
    "sample_gue",
    "spawn_rng",
    "spectral_norm",
    "uniform_eigenstate_superposition",
    "verify_theorem1",
    "__version__",
]
