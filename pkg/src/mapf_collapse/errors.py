"""Exception types shared across the package.

The CLI maps these onto exit codes: bad or infeasible input -> 2,
internal consistency failures -> 3, refused requests (caps, degenerate
reductions, planning failures) -> 4.
"""

from __future__ import annotations


class MapParseError(ValueError):
    """Raised when a grid map file cannot be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class UnknownVertexError(KeyError):
    """Lookup of a vertex that is not part of the graph."""


class InstanceFormatError(ValueError):
    """Instance JSON does not match the expected schema."""


class InfeasibleInputError(RuntimeError):
    """An input schedule failed validation; carries the report."""

    def __init__(self, report):
        first = report.violations[0] if report.violations else None
        super().__init__(f"input schedule is infeasible (first violation: {first})")
        self.report = report


class UnsupportedScheduleError(ValueError):
    """An operation requires a grid schedule but got an abstract one."""


class PlanningError(RuntimeError):
    """The planner could not route an agent within its horizon cap."""

    def __init__(self, agent: str, message: str):
        super().__init__(f"agent {agent!r}: {message}")
        self.agent = agent


class CapExceededError(RuntimeError):
    """A brute-force routine refused an input above its size cap."""


class ConsistencyError(RuntimeError):
    """Internal invariant broken (e.g. an applied solution fails validation)."""
