"""Spectral solver and estimate laboratory for the diffusive Kermack-McKendrick system."""

from .dynamics import (
    KmParams,
    KmState,
    MuSign,
    Trajectory,
    dimensionalize,
    duhamel_apply,
    duhamel_bilinear,
    duhamel_linear,
    free_flow,
    mass_balance_residual,
    nondimensionalize,
    total_mass,
    uniform_times,
)
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    EmptyTrajectoryError,
    GridMismatchError,
    KmError,
    MissingParameterError,
    NonRealFieldError,
    QuadratureError,
    ReactionOverflowError,
)
from .oracles import adaptive_quadrature, rk4_sir, splitting_solve
from .picard import (
    WellPosednessGate,
    contraction_probe,
    lipschitz_probe,
    picard_solve,
    smallness_check,
)
from .spaces import FieldHistory, SobolevIndex, lp_norm, pair_norm, sobolev_norm, xs_norm
from .spectral import (
    GridSpec,
    RealField,
    SpectralField,
    forward_transform,
    heat_flow,
    heat_semigroup,
    inverse_transform,
    riesz_derivative,
)

__version__ = "0.1.0"
