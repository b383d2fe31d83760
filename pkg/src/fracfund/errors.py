"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class GridMismatchError(ValueError):
    """Two grid functions (or a grid and a target) do not line up."""


class ProblemSpecError(ValueError):
    """A problem description is incomplete or inconsistent."""


class PreconditionError(ValueError):
    """A method was invoked on a problem that violates its preconditions."""


class NonConvergenceError(RuntimeError):
    """An iteration or series failed to reach its tolerance within budget."""


class SingularSystemError(RuntimeError):
    """An implicit step produced a singular or non-finite linear system."""


class ToleranceNotMetError(RuntimeError):
    """Adaptive quadrature exhausted its budget above the requested tolerance."""
