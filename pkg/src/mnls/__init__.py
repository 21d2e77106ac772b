"""Spectral simulator for the cubic NLS under strong magnetic confinement,
its time-averaged limit, and the full resonant system."""

__version__ = "0.1.0"

from .basis import BasisWorkspace, build_basis, eigen_phase, analyze_x, synthesize_x
from .field import (
    ZGrid,
    SpectralField,
    GridField,
    to_grid,
    to_spectral,
    propagate,
    project_level,
    multiply_z,
    apply_z_bessel,
    lens_transform_check,
    save_snapshot,
    load_snapshot,
    random_field,
)
from .nonlinear import (
    ThetaRule,
    resonant_quadruples,
    cubic_pointwise,
    full_nonlinearity,
    f_av,
    resonant_sum_oracle,
    partial_resonant,
    fr_rhs,
)
from .norms import (
    NormConfig,
    sigma_x_norm,
    sigma0_norm,
    z_norm,
    s_norm,
    s_plus_norm,
    mass,
    level_energy,
    angular_momentum,
    time_weighted_sup,
)
from .dynamics import (
    SimConfig,
    Trajectory,
    initial_data,
    step_strang_eps,
    step_profile_rk4,
    step_limit,
    step_fr,
    run,
)
from .diagnostics import DiagnosticsSeries, config_hash
from .errors import ConfigError, NumericsError, ThetaRuleError

__all__ = [name for name in dir() if not name.startswith("_")]
