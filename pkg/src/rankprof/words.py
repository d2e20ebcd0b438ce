"""Alphabets, finite words, and enumeration of all words up to a length bound.

Words are immutable value objects: a tuple of letter indices into a fixed
Alphabet.  The canonical order used everywhere downstream (witness selection,
enumeration, tie-breaking) is length first, then lexicographic by alphabet
position.  Words render as plain symbol strings, with the empty word written
as the token ``@eps``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .errors import AlphabetMismatchError, HorizonTooLargeError

EPSILON_TOKEN = "@eps"

# Refuse to enumerate a ball once |alphabet| ** (n + 1) passes this; the exact
# computations are deliberately desk-scale and must fail loudly, not crawl.
DEFAULT_BALL_CAP = 2**22


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct printable single-character symbols."""

    symbols: tuple[str, ...]

    def __init__(self, symbols):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("alphabet needs at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet symbols must be distinct: {symbols!r}")
        for s in symbols:
            if not (isinstance(s, str) and len(s) == 1 and s.isprintable() and not s.isspace()):
                raise ValueError(f"alphabet symbols must be printable characters: {s!r}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.symbols

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.symbols!r}") from None

    def word(self, text: str) -> Word:
        """Parse a plain symbol string (or the @eps token) into a Word."""
        if text == EPSILON_TOKEN:
            return Word(self, ())
        return Word(self, tuple(self.index(ch) for ch in text))

    def epsilon(self) -> Word:
        return Word(self, ())

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.symbols)!r})"


@dataclass(frozen=True)
class Word:
    """Finite word: letter indices into its alphabet.  Immutable and hashable."""

    alphabet: Alphabet
    letters: tuple[int, ...]

    def __post_init__(self):
        k = len(self.alphabet)
        if any(not (0 <= i < k) for i in self.letters):
            raise ValueError(f"letter index out of range for {self.alphabet!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def symbol_at(self, position: int) -> str:
        """Symbol at a 1-based position, matching the logical structure."""
        if not 1 <= position <= len(self.letters):
            raise IndexError(f"position {position} outside 1..{len(self.letters)}")
        return self.alphabet.symbols[self.letters[position - 1]]

    def symbols(self) -> tuple[str, ...]:
        return tuple(self.alphabet.symbols[i] for i in self.letters)

    def text(self) -> str:
        """Serialized form: plain symbol string, @eps when empty."""
        if not self.letters:
            return EPSILON_TOKEN
        return "".join(self.symbols())

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Canonical length-then-lex key (lex by alphabet position)."""
        return (len(self.letters), self.letters)

    def __lt__(self, other: Word) -> bool:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatchError("cannot order words over different alphabets")
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"Word({self.text()!r})"


def concat(u: Word, v: Word) -> Word:
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError(
            f"cannot concatenate over {u.alphabet!r} and {v.alphabet!r}"
        )
    return Word(u.alphabet, u.letters + v.letters)


def power(x: Word, m: int) -> Word:
    """x repeated m times; power(x, 0) is the empty word."""
    if m < 0:
        raise ValueError("exponent must be nonnegative")
    return Word(x.alphabet, x.letters * m)


def ball_size(alphabet_size: int, n: int) -> int:
    """Number of words of length at most n over an alphabet of given size."""
    if alphabet_size == 1:
        return n + 1
    return (alphabet_size ** (n + 1) - 1) // (alphabet_size - 1)


def enumerate_ball(alphabet: Alphabet, n: int, cap: int = DEFAULT_BALL_CAP) -> Iterator[Word]:
    """All words of length <= n, in length-then-lexicographic order.

    Refuses up front (HorizonTooLargeError) when |alphabet| ** (n + 1)
    exceeds the cap, so callers never start an enumeration they cannot
    finish.
    """
    if n < 0:
        raise ValueError("horizon must be nonnegative")
    if len(alphabet) ** (n + 1) > cap:
        raise HorizonTooLargeError(
            f"ball of radius {n} over {len(alphabet)} symbols exceeds cap {cap}"
        )
    for length in range(n + 1):
        for combo in product(range(len(alphabet)), repeat=length):
            yield Word(alphabet, combo)
