"""Exception hierarchy shared by every selfzeta module."""


class SelfZetaError(Exception):
    """Base class for all library errors."""


class DomainError(SelfZetaError, ValueError):
    """Argument outside the domain of the function."""


class PoleError(DomainError):
    """Argument within the pole-exclusion radius of a pole."""


class TruncationError(SelfZetaError, ArithmeticError):
    """An integrand or series does not decay inside the configured cutoff."""


class ConvergenceError(SelfZetaError, ArithmeticError):
    """A series hit its term cap before meeting its tail bound."""


class QuadratureError(SelfZetaError, ArithmeticError):
    """Adaptive quadrature failed to reach tolerance or met a non-finite value."""


class NormalizationError(ConvergenceError):
    """A candidate density cannot be normalized (divergent integral)."""


class EnvelopeError(SelfZetaError, RuntimeError):
    """Rejection sampler acceptance rate collapsed."""


class ConfigError(SelfZetaError, ValueError):
    """Malformed verification or run configuration."""
