from __future__ import annotations

from typing import Any


class LatresError(Exception):
    """Base class for every error raised by the latres library."""


class PreconditionError(LatresError, ValueError):
    pass


class ResourceLimitError(LatresError, RuntimeError):
    def __init__(self, guard: str, requested: int, limit: int) -> None:
        super().__init__(
            f"{guard}: requested {requested} exceeds the limit {limit} "
            "(override with LATRES_MAX_ELEMENTS)"
        )
        self.guard = guard
        self.requested = requested
        self.limit = limit


class NonTerminationError(LatresError, RuntimeError):
    """Raised when normalize hits its step circuit breaker."""

    def __init__(self, steps: int, trace: Any = None) -> None:
        super().__init__(f"non-termination suspected after {steps} insertions")
        self.steps = steps
        self.trace = trace


class LatdiagParseError(LatresError, ValueError):
    def __init__(self, line_number: int, reason: str) -> None:
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason
