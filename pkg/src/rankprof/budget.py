"""Step budgets for the potentially expensive searches.

A Budget is a mutable countdown of "elementary steps" (memo insertions, game
configurations, closure edges).  Expensive operations accept an optional
Budget; when it runs dry they raise BudgetExceededError instead of silently
truncating.  The default of 10**8 steps is far beyond anything the desk-scale
horizons need, so it only trips on genuinely oversized requests.
"""

import os

from .errors import BudgetExceededError

DEFAULT_STEP_BUDGET = 10**8
BUDGET_ENV_VAR = "RANKPROF_BUDGET"


class Budget:
    """Countdown of elementary steps; spend() raises once exhausted."""

    __slots__ = ("limit", "remaining")

    def __init__(self, steps: int = DEFAULT_STEP_BUDGET):
        if steps <= 0:
            raise ValueError("budget must be positive")
        self.limit = steps
        self.remaining = steps

    def spend(self, steps: int = 1) -> None:
        self.remaining -= steps
        if self.remaining < 0:
            raise BudgetExceededError(
                f"step budget of {self.limit} exhausted; "
                f"raise the cap (or {BUDGET_ENV_VAR}) to go further"
            )

    def __repr__(self) -> str:
        return f"Budget(limit={self.limit}, remaining={self.remaining})"


def default_budget() -> Budget:
    """Fresh budget honoring the RANKPROF_BUDGET environment override."""
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return Budget()
    try:
        steps = int(raw)
    except ValueError as exc:
        raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc
    return Budget(steps)
