"""Exception hierarchy shared by all modules."""


class OUStrichartzError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatchError(OUStrichartzError, ValueError):
    pass


class DomainError(OUStrichartzError, ValueError):
    """An argument lies outside the region where evaluation is reliable."""


class BudgetExceededError(OUStrichartzError, MemoryError):
    """A grid or matrix would exceed the configured size budget."""


class SingularTimeError(DomainError):
    """Time too close to a singularity of the imaginary-time kernel."""


class ResolutionError(OUStrichartzError, ValueError):
    """Quadrature or time grid too coarse for the requested degree/frequency."""


class SurfaceError(OUStrichartzError, ValueError):
    """Coefficient not supported on the discrete surface listing."""


class StripError(DomainError):
    """Analytic parameter outside the convergent strip -1 < Re z <= 0."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class ConvergenceError(OUStrichartzError, ArithmeticError):
    """Series extrapolation did not stabilise within tolerance."""


class ExponentError(OUStrichartzError, ValueError):
    """Lebesgue or Schatten exponent outside its admissible range."""


class RegimeError(OUStrichartzError, ValueError):
    """Coherent-state parameters violate the required ordering."""


class ConfigError(OUStrichartzError, ValueError):
    """Invalid run configuration."""
