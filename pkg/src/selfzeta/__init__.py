"""Self-reciprocal densities, their theta series, and Riemann-type xi functions."""
from . import density, mellin, montecarlo, specfun, theta, verify
from .density import MixingDensitySpec, SRDensity, make_custom_g1, make_family, mixture, normalize
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    EnvelopeError,
    NormalizationError,
    PoleError,
    QuadratureError,
    SelfZetaError,
    TruncationError,
)
from .grids import SGrid, parse_grid, standard_grid
from .theta import ThetaSeries, theta_series

__version__ = "0.1.0"
