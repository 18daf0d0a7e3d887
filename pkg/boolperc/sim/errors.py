"""Exceptions raised by the simulation engine."""
from typing import Optional


class PercolationError(Exception):
    """Base class for every engine error."""


class ConfigError(PercolationError, ValueError):
    """Invalid experiment configuration or spec string."""


class ResourceLimitError(PercolationError):
    """A computation would exceed the vertex budget or the sampled window."""


class BudgetExceededError(ResourceLimitError):
    """A ball or exploration grew past the configured vertex budget."""

    def __init__(self, budget: int, what: str = "ball"):
        self.budget = budget
        super().__init__(f"{what} exceeds vertex budget of {budget} vertices")


class WindowTooSmallError(ResourceLimitError):
    """The sampled window does not contain the region an event reads."""


class OutOfWindowError(ResourceLimitError):
    """A vertex was queried outside the sampled window."""


class GraphFormatError(PercolationError, ValueError):
    """Malformed graph file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NonPositiveWeightError(GraphFormatError):
    """Edge weight below 1 in a graph file."""


class DegenerateFitError(PercolationError, ValueError):
    """Not enough distinct data points for a regression."""


class InfiniteMomentError(PercolationError, ValueError):
    """E[R^dim] is infinite, so the subcritical threshold does not exist."""


class OracleDomainError(PercolationError, ValueError):
    """The exact enumeration oracle was asked for an unsupported case."""
