"""
Exception hierarchy shared by the services, the orchestrator and the CLI.
"""

from typing import Optional


class KnotError(Exception):
    """Base class for every domain error raised by the census."""


class NotationError(KnotError, ValueError):
    """A notation string or pair set violates the notation grammar or invariants."""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message)
        self.token = token


class MalformedNotationError(NotationError):
    pass


class OddTokenCountError(NotationError):
    pass


class DuplicateLabelError(NotationError):
    pass


class LabelRangeError(NotationError):
    pass


class UnrealizableError(KnotError):
    """The operation needs a drawable notation."""


class MoveError(KnotError, ValueError):
    """A move descriptor does not apply to the notation it was given."""


class BudgetError(KnotError, ValueError):
    """Search budgets are inconsistent with the inputs."""


class ColoringGuardError(KnotError):
    """Brute-force coloring would exceed the configured assignment limit."""


class ConfigError(KnotError, ValueError):
    """A run configuration was rejected before any computation started."""


class TableFormatError(KnotError):
    """A classification table file could not be read."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
