"""Exception types shared across the package."""


class HyperregError(Exception):
    """Base class for all library errors."""


class StructureError(HyperregError, ValueError):
    """An object violates a structural invariant (bad class, missing closure edge, ...)."""


class ParseError(StructureError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(HyperregError, ValueError):
    """Arguments are well-formed but outside the domain of the operation."""


class CapacityError(HyperregError):
    """The requested exact computation exceeds a configured size cap."""
