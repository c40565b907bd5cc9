"""Spectral laboratory for a viscous, heat-conducting charged fluid coupled
to Maxwell fields: per-mode semigroup analysis, whole-space decay
quadrature on isotropic data families, energy-functional monitors, and a
periodic-box pseudospectral solver for the full nonlinear system."""

from .params import IdealGasLaw, ModelParams, VirialGasLaw, params_hash, pressure_partials
from .spectral import (
    SpectralGrid,
    curl,
    dealias,
    divergence,
    e_par_from_density,
    enforce_hermitian,
    gradient,
    helmholtz_decompose,
    inverse_laplacian,
    l2_inner,
    l2_norm,
    laplacian,
    read_snapshot,
    sobolev_norm,
    to_physical,
    to_spectral,
    write_snapshot,
    ZeroMeanError,
)
from .state import StateVector
from .sources import SingularStateError, source_terms
from .expm import expm, expm_batch, matrix_exponential_apply
from .symbols import build_em_symbol, build_fluid_symbol, full_linear_generator
from .semigroup import (
    CompatibilityError,
    EMFamily,
    FluidFamily,
    QuadratureAccuracyError,
    compatible_profile,
    decay_curve,
    em_bound_check,
    em_slowest_rate,
    fluid_bound_check,
    gaussian_profile,
    propagate_linear_mode,
    whole_space_l2,
)
from .energy import (
    EnergyWeights,
    WeightsTooLargeError,
    dissipation,
    dissipation_high,
    energy_full,
    energy_high,
    equivalence_report,
    monitor_dissipation,
)
from .solver import (
    BlowUpError,
    SolverConfig,
    Trajectory,
    constraint_residuals,
    init_compatible,
    random_state,
    rhs,
    run,
    step,
)
from .fitting import FitResult, fit_decay

__version__ = "0.1.0"
