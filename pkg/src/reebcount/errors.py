"""Exception hierarchy shared by all modules."""


class ReebCountError(Exception):
    """Base class for every error raised by this package."""


class InputError(ReebCountError, ValueError):
    """Malformed or out-of-range user input."""


class DimensionError(InputError):
    pass


class InvariantError(ReebCountError, ValueError):
    """A value violates a structural invariant (e.g. a non-symplectic matrix)."""


class PreconditionError(ReebCountError, ValueError):
    pass


class PrecisionError(ReebCountError, ArithmeticError):
    """Floating-point escalation could not separate eigenvalue clusters."""


class IndexUndefinedError(ReebCountError, ValueError):
    """The Conley-Zehnder index is requested for a degenerate endpoint."""


class ResolutionError(ReebCountError, ValueError):
    """Sampled path is too coarse to lift the rho-angle unambiguously."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class GuardExceededError(ReebCountError, ValueError):
    """An iterate exceeds the validity guard of a rational angle."""


class HypothesisError(ReebCountError, ValueError):
    """A theorem-level hypothesis (e.g. |c| > n - 1) is not met."""


class ScopeError(ReebCountError, ValueError):
    pass
