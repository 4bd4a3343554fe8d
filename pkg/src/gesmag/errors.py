"""Exception types shared across the package."""


class GesmagError(Exception):
    """Base class for all package errors."""


class GraphKindError(GesmagError):
    """An operation received a graph of the wrong kind (e.g. circle marks
    where a directed mixed graph was expected)."""


class CycleError(GesmagError):
    """The directed part of a graph contains a cycle."""


class DomainError(GesmagError):
    """Arguments violate an operation's precondition."""


class InvalidMecError(GesmagError):
    """A partial ancestral graph does not represent a valid Markov
    equivalence class (its representative graph fails validation)."""


class DegenerateDataError(GesmagError):
    """The sample covariance of the requested variables is singular."""


class InsufficientSampleError(GesmagError):
    """Too few samples to estimate the requested entropy."""
