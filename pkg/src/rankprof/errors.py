"""Shared exception types.

Every failure mode that callers are expected to handle has its own class;
anything raised as a bare ValueError/RuntimeError indicates misuse or an
internal bug, not a recoverable condition.
"""


class RankprofError(Exception):
    """Base class for all library errors."""


class AlphabetMismatchError(RankprofError):
    """Two values built over different alphabets were combined."""


class HorizonTooLargeError(RankprofError):
    """Ball enumeration would exceed the configured materialization cap."""


class BudgetExceededError(RankprofError):
    """A computation ran out of its elementary-step budget."""


class CapExceededError(RankprofError):
    """A structural cap (game size, monoid size, search depth) was hit."""


class UnboundVariableError(RankprofError):
    """A formula was evaluated with a free variable missing from the assignment."""


class RegexSyntaxError(RankprofError):
    """Regex text failed to parse; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotDisjointError(RankprofError):
    """Separator inputs share a word; carries one common word."""

    def __init__(self, common_word):
        super().__init__(f"languages are not disjoint: both contain {common_word!r}")
        self.common_word = common_word


class NoCycleWitnessError(RankprofError):
    """Cycle extraction was asked for a language with aperiodic syntactic monoid."""
