"""Laplace boundary integral equations on flat tori with holes."""
from .elliptic import SeriesTolerance, Torus, theta1, theta1_log_deriv, theta1_prime_at_zero
from .exceptions import (
    AreaError,
    ConfigurationError,
    EigensolverFailure,
    InvalidCurve,
    InvalidN,
    NonConvergent,
    NonZeroMeanData,
    NumericalError,
    OverlapError,
    ParseError,
    SingularArgument,
    SingularSystem,
    TorusBIEError,
)
from .fields import eval_double_layer, eval_single_layer, eval_solution, flux, steklov_residual, steklov_residuals
from .geometry import Hole, QuadratureGrid, Region, build_grid, classify_point, curve_eval
from .green import KernelPoint, green, green_gradient
from .operators import LayerOperators
from .solvers import neumann_to_dirichlet, solve_dirichlet, solve_neumann, solve_steklov, steklov_flux

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # source tree without installation
    __version__ = "0.1.0"
