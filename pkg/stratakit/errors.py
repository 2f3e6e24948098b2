from typing import Any, List, Optional


class StratakitError(ValueError):
    """Base class for every error raised by the library."""


class ConfigError(StratakitError):
    """Raised when settings or budget overrides cannot be parsed."""


class InvalidGraphError(StratakitError):
    """Raised when an operation receives a dual graph violating its invariants."""

    def __init__(self, message: str, violations: Optional[List[Any]] = None):
        super().__init__(message)
        self.violations = violations or []


class BudgetExceededError(StratakitError):
    """Raised when a computation would exceed one of the configured budgets."""

    def __init__(self, budget: str, limit: int, observed: int):
        super().__init__(f"Budget {budget} exceeded: {observed} > {limit}")
        self.budget = budget
        self.limit = limit
        self.observed = observed


class GroupTooLargeError(StratakitError):
    """Raised when elements are requested for a group above the element budget."""


class PosetError(StratakitError):
    """Raised for malformed posets or missing elements."""


class QuotientOrderError(PosetError):
    """Raised when an orbit relation fails to be a partial order."""


class DeltaConditionError(StratakitError):
    """Raised when a subgroup family violates one of its defining conditions."""


class CategoryError(StratakitError):
    """Raised when a finite category or functor fails its structural laws."""
