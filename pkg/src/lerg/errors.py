"""Exception hierarchy and the CLI exit-code contract.

Exit codes are stable: 0 success, 1 validation error, 2 resource/cap
error, 3 model transport error.
"""

from __future__ import annotations


class LergError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(LergError):
    """Input violates a documented precondition or invariant."""

    exit_code = 1


class EmptyText(ValidationError):
    """Text to segment has no non-whitespace content."""


class EmptyCorpus(ValidationError):
    """A corpus operation received no examples."""


class EmptyFile(ValidationError):
    """An input file contains no records."""


class ParseError(ValidationError):
    """A line-addressed parse failure in an input file."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class DegenerateInput(ValidationError):
    """Instance too small or empty for the requested operation."""


class DomainError(ValidationError):
    """Numeric argument outside the operation's domain."""


class SingularSystem(LergError):
    """Least-squares system is rank-deficient beyond ridge repair."""

    exit_code = 1


class ReferenceUnderflow(LergError):
    """A probability fell below the estimator floor (1e-12)."""

    exit_code = 1


class ScoreDomainError(LergError):
    """A scorer returned a non-finite value, or a normalized model
    returned a log-probability above the normalization tolerance."""

    exit_code = 1


class TooLarge(LergError):
    """Instance exceeds an enumeration or resource cap."""

    exit_code = 2


class RemoteUnavailable(LergError):
    """Transport to a remote model failed after retries."""

    exit_code = 3


class ModelProtocolError(LergError):
    """A remote model replied with a malformed or error message."""

    exit_code = 3

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        self.code = code
