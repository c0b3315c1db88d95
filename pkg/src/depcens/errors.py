"""Exception hierarchy shared across the package."""


class DepcensError(Exception):
    """Base class for all package-specific errors."""


class InputError(DepcensError, ValueError):
    """Invalid argument or malformed data."""


class ParseError(InputError):
    """CSV input could not be parsed; message names row and column."""


class DegenerateTransformError(DepcensError):
    """A step transform without jumps cannot be inverted away from zero."""


class InvalidStateError(DepcensError):
    """An operation was called in a state that violates its preconditions."""


class EstimationError(DepcensError):
    """The fitting algorithm could not make progress."""
