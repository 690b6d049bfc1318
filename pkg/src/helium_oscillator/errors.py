"""Exception types raised by the helium oscillator model."""


class ModelError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ModelError, ValueError):
    """An input lies outside the domain where the model is defined."""


class QuantumNumberError(DomainError):
    """A quantum number is not a positive multiple of one half."""


class UnitError(ModelError, ValueError):
    pass


class DegenerateCubicError(ModelError):
    """The leading coefficient of the spectral cubic vanishes."""


class ComplexRootsError(ModelError):
    """The spectral cubic has fewer than three real roots."""


class PoleError(ModelError):
    """A root sits on the pole of the rational expression for gamma1."""


class NonSymmetricError(ModelError, ValueError):
    pass


class NoConvergenceError(ModelError):
    pass


class AmbiguousPairingError(ModelError):
    """Numeric and analytic eigenvectors could not be paired unambiguously."""


class ZeroEigenvalueError(ModelError):
    pass


class AllUndefinedError(ModelError):
    """No node of a grid scan produced a defined residual."""


class NoIntersectionError(ModelError):
    """The three radius surfaces have no common point in the search domain."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class FixtureFormatError(ModelError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
