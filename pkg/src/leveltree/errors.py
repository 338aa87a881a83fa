"""Exception types shared across the package."""


class LevelTreeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(LevelTreeError):
    """Arguments or data violate a documented precondition."""


class NotFoundError(LevelTreeError):
    """A requested node or resource does not exist."""


class UnachievableKError(LevelTreeError):
    """The tree cannot supply the requested number of disjoint clusters."""


class ParseError(LevelTreeError):
    """Malformed input file. Carries the offending line or document location."""

    def __init__(self, message, *, line=None, location=None):
        self.line = line
        self.location = location
        if line is not None:
            message = f"{message} (line {line})"
        elif location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
