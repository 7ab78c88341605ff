"""Exception types raised by the library."""


class KFueterError(Exception):
    """Base class for all library errors."""


class DomainError(KFueterError, ValueError):
    """An argument lies outside the supported domain (e.g. ``k < 2``)."""


class IndexRangeError(KFueterError, IndexError):
    pass


class ShapeError(KFueterError, ValueError):
    pass


class CompatibilityError(KFueterError):
    """The right-hand side violates the compatibility condition ``D1 f = 0``.

    ``violation`` holds the measured relative norm.
    """

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class OrthogonalityError(KFueterError):
    """The right-hand side has a component along the harmonic space."""

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class MeanModeError(KFueterError):
    pass


class ExactnessViolation(KFueterError):
    """A pointwise or polynomial exactness check failed."""


class EllipticityViolation(KFueterError):
    pass


class TheoryViolation(KFueterError):
    """A bound that holds by proof was observed to fail."""


class RootSplitError(KFueterError):
    """The boundary ODE does not have the expected number of decaying modes."""


class SolverError(KFueterError):
    """An iterative or eigen solver failed; ``history`` carries diagnostics."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []
