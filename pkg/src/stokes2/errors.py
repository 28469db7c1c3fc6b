"""Exception types raised by the solver."""


class Stokes2Error(Exception):
    """Base class for all solver errors."""


class ConfigError(Stokes2Error, ValueError):
    """A parameter violates a documented invariant."""


class DomainError(Stokes2Error, ValueError):
    """An argument lies outside the domain of a function."""


class NumericalError(Stokes2Error, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class QuadratureError(NumericalError):
    """Quadrature did not converge within the panel budget."""


class DegeneracyError(NumericalError):
    """The dispersion factor vanishes on the wavenumber grid."""


class ResolutionError(NumericalError):
    """A wavenumber grid is too coarse for the requested accuracy."""


class ConditioningError(NumericalError):
    """A linear system is too ill-conditioned to trust."""


class SeriesDivergenceWarning(RuntimeWarning):
    """Neumann term norms stopped decaying."""
