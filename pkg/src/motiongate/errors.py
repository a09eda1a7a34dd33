"""Exception hierarchy shared by all motiongate modules."""

from __future__ import annotations


class MotionGateError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MotionGateError, ValueError):
    """An input or configuration violates a documented invariant."""


class ParseError(ValidationError):
    """A text input could not be parsed.

    ``line`` is the 1-based line number of the offending row (header is line 1),
    or ``None`` when the problem is not tied to a single line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SequencingError(ValidationError):
    """Events or commands were presented out of time order."""


class ScheduleInfeasibleError(ValidationError):
    """The bus transaction does not fit inside the sampling period."""


class PairingError(ValidationError):
    """Questionnaire responses could not be matched one-to-one by participant."""


class InsufficientDataError(ValidationError):
    """Too few observations for the requested statistic."""
