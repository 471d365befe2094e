from __future__ import annotations


class RelkitError(Exception):
    """Base class for every error raised by relkit."""


class DegreeMismatchError(RelkitError):
    """Two objects that must act on the same point set have different degrees."""

    def __init__(self, left: int, right: int) -> None:
        super().__init__(f"Degree mismatch: {left} != {right}")
        self.left = left
        self.right = right


class ParseError(RelkitError):
    """Cycle notation, group spec or relation file could not be read."""

    def __init__(self, message: str, position: int | None = None) -> None:
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class CapExceededError(RelkitError):
    """A configured work or degree cap would be exceeded."""

    def __init__(
        self,
        message: str,
        *,
        cap: str,
        limit: int,
        required: int | None = None,
    ) -> None:
        super().__init__(message)
        self.cap = cap
        self.limit = limit
        self.required = required


class PreconditionError(RelkitError):
    """An operation's input does not satisfy a named hypothesis."""

    def __init__(self, message: str, check: str) -> None:
        super().__init__(message)
        self.check = check


class NotTransitiveError(PreconditionError):
    def __init__(self, message: str = "Group is not transitive") -> None:
        super().__init__(message, check="not-transitive")


class UnknownGroupError(RelkitError):
    """Group name not found in the catalog."""


class VerificationError(RelkitError):
    """A computed object failed its own postcondition check."""

    def __init__(self, message: str, details: dict | None = None) -> None:
        super().__init__(message)
        self.details = details or {}


class ConfigError(RelkitError):
    """A configuration value (file, env var or flag) is invalid."""
