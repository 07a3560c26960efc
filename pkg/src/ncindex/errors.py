"""Exception hierarchy shared by every module of the package."""


class NCIndexError(Exception):
    """Base class for all errors raised by ncindex."""


class IncompatibleAlgebraError(NCIndexError, ValueError):
    """Operands live in different crossed products (group, circumference or truncation)."""


class TruncationOverflowError(NCIndexError):
    """A product would produce support beyond the configured radius cap."""


class GridMismatchError(NCIndexError, ValueError):
    """A shift is not an integer multiple of the grid spacing and interpolation is off."""


class DomainError(NCIndexError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class PreconditionError(NCIndexError, ValueError):
    """An input violates a documented precondition (non-elliptic, not a projection, ...)."""


class NotInvertibleError(NCIndexError):
    """Neither the Neumann series nor the dense solve reached the requested residual."""

    def __init__(self, message, neumann_residual=None, dense_residual=None):
        super().__init__(message)
        self.neumann_residual = neumann_residual
        self.dense_residual = dense_residual


class DegenerateParameterError(NCIndexError, ValueError):
    """The Rieffel construction is undefined for this parameter (1/theta integral)."""


class ResolutionError(NCIndexError):
    """A certification residual is too large at the requested truncation."""

    def __init__(self, message, suggested_modes=None):
        super().__init__(message)
        self.suggested_modes = suggested_modes


class NonIntegralIndexError(NCIndexError):
    """An index integral is not within tolerance of an integer."""


class InvarianceViolationError(NCIndexError):
    """A symbol does not intertwine the projections it is twisted with."""


class IndeterminateIndexError(NCIndexError):
    """No clear spectral gap separates the near-null singular values."""


class BoundaryTailError(NCIndexError):
    """The line box is too short for the Gaussian-scale tails of the problem."""


class ConfigError(NCIndexError, ValueError):
    """A scenario configuration failed schema validation."""


class IdempotencyError(NCIndexError):
    """A constructed projection fails idempotency at some grid node."""

    def __init__(self, message: str, node: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.node = node
        self.residual = residual
