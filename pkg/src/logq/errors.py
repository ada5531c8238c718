"""Exception types shared across the package."""


class LogqError(Exception):
    """Base class for every package-specific error."""


class DomainError(LogqError, ValueError):
    """An input lies outside a function's mathematical domain."""


class RankDeficiencyError(LogqError, ValueError):
    """The regression design cannot identify the model parameters."""


class SchemaError(LogqError, ValueError):
    """A required CSV column is missing."""


class ParseError(LogqError, ValueError):
    """A CSV cell could not be parsed as a number."""


class ValidationError(LogqError, ValueError):
    """A parsed value violates a dataset invariant."""
