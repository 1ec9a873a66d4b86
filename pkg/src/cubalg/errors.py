"""Exception hierarchy shared by all modules."""


class CubalgError(Exception):
    """Base class for every error raised by the library."""


class InputError(CubalgError, ValueError):
    """Malformed or inconsistent user input."""


class NumericError(CubalgError, ArithmeticError):
    """A numerical procedure failed (non-convergence, singular system)."""


class CoefficientExhaustedError(InputError, IndexError):
    """A recurrence coefficient beyond the supplied sequence was requested."""


class UnsupportedNormalizationError(InputError):
    """The operation needs a monic system."""


class InvalidDesignError(InputError):
    """Design points are not pairwise distinct, or the node polynomial has repeated roots."""


class InvalidFractionError(InputError):
    """A fraction is not a subset of its parent design."""


class DimensionMismatchError(InputError):
    """Exponent vectors or points of different lengths were mixed."""


class OrderError(InputError):
    """The term order is unsuitable for the requested operation."""


class DegenerateNodesError(NumericError):
    """The evaluation matrix of a node set is singular."""
