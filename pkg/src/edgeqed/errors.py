"""Exception hierarchy shared by all modules."""


class EdgeQEDError(Exception):
    """Base class for all package errors."""


class DomainError(EdgeQEDError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class GridError(EdgeQEDError, ValueError):
    """A grid is malformed or incompatible with another grid."""


class DesignError(EdgeQEDError, RuntimeError):
    """A pulse design is degenerate or the target is not realizable."""


class ToleranceError(EdgeQEDError, RuntimeError):
    """A numerical result failed a stated tolerance (CLI exit code 3)."""


class ConfigError(EdgeQEDError, ValueError):
    """A scenario configuration could not be parsed or validated (CLI exit code 2)."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line
