"""Rank-q equivalence of words: canonical types, game search, rank distance.

Two words are rank-q equivalent when they satisfy the same sentences of
quantifier rank at most q; equivalently the q-round back-and-forth game on
them is a win for the matching player.  This module decides that relation two
independent ways:

* ``rank_type`` builds a canonical interned value for the whole rank-q class
  of a word.  It works compositionally: the class of a word with one marked
  position is determined by the marked letter together with the classes of
  the two factors around it (play restricted to either side of the mark stays
  there, and componentwise strategies combine), so the rank-q type is the set
  of (letter, left-factor type, right-factor type) triples at rank q-1 over
  all positions.  Interning makes equality an identity check, and memoizing
  on factor content makes whole-ball computations cheap - the unary case
  degenerates to one entry per (length, rank).

* ``game_equivalent`` searches the alternating move tree of the game
  directly, memoized on marked-pair configurations.  It shares no code with
  ``rank_type`` and exists as a cross-implementation oracle for small words.

Equality of types is intentionally alphabet-independent: only the letters
actually present in a word matter to the game, so words spelled identically
over different alphabets get the same type.
"""

from __future__ import annotations

import hashlib
from itertools import count

from .budget import Budget
from .errors import CapExceededError
from .words import Word

FINGERPRINT_VERSION = b"RT1"

DEFAULT_GAME_CAP = 12


class RankType:
    """Interned canonical representative of a rank-q equivalence class.

    ``extensions`` holds one entry per single-position extension of the
    underlying word: a triple (letter at the position, type of the factor
    before it, type of the factor after it), each factor type at rank - 1.
    The letter is the atomic data of the marked position; the factor pair
    determines everything else about the marked configuration.  Two RankType
    objects compare equal (identical, in fact) exactly when the underlying
    words are rank-q equivalent.
    """

    __slots__ = ("rank", "extensions", "uid", "_fingerprint")

    _uids = count()

    def __init__(self, rank: int, extensions: tuple):
        self.rank = rank
        self.extensions = extensions
        self.uid = next(RankType._uids)
        self._fingerprint: bytes | None = None

    def fingerprint(self) -> bytes:
        """Canonical versioned digest, stable across runs and processes.

        Computed recursively: sha256 over the version tag, the rank, and the
        sorted hex digests of ``letter:left:right`` for every extension.
        Sorting is by content, so independent runs agree byte-for-byte.
        """
        if self._fingerprint is None:
            parts = sorted(
                f"{sym}:{left.fingerprint().hex()}:{right.fingerprint().hex()}"
                for sym, left, right in self.extensions
            )
            blob = b"|".join([FINGERPRINT_VERSION, str(self.rank).encode()]
                             + [p.encode() for p in parts])
            self._fingerprint = hashlib.sha256(blob).digest()
        return self._fingerprint

    def __repr__(self) -> str:
        return f"RankType(rank={self.rank}, uid={self.uid})"


# Interning table and content memo are process-global: types computed for the
# same letters always come back as the same object, which keeps equality O(1).
_INTERN: dict[tuple, RankType] = {}
_MEMO: dict[tuple, RankType] = {}


def clear_type_caches() -> None:
    """Drop all interned types (mainly for isolating benchmarks/tests)."""
    _INTERN.clear()
    _MEMO.clear()


def _intern(rank: int, ext_set: frozenset) -> RankType:
    key = (rank, ext_set)
    hit = _INTERN.get(key)
    if hit is None:
        ordered = tuple(sorted(ext_set, key=lambda e: (e[0], e[1].uid, e[2].uid)))
        hit = RankType(rank, ordered)
        _INTERN[key] = hit
    return hit


_RANK0 = _intern(0, frozenset())


def _type_of(symbols: tuple[str, ...], q: int, budget: Budget) -> RankType:
    if q == 0:
        return _RANK0
    key = (symbols, q)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    budget.spend(len(symbols) + 1)
    exts = frozenset(
        (symbols[i],
         _type_of(symbols[:i], q - 1, budget),
         _type_of(symbols[i + 1:], q - 1, budget))
        for i in range(len(symbols))
    )
    result = _intern(q, exts)
    _MEMO[key] = result
    return result


def rank_type(w: Word, q: int, budget: Budget | None = None) -> RankType:
    """Canonical rank-q type of a word; identical objects mean equivalent words."""
    if q < 0:
        raise ValueError("rank must be nonnegative")
    return _type_of(w.symbols(), q, budget or Budget())


def equivalent(u: Word, v: Word, q: int, budget: Budget | None = None) -> bool:
    """True iff u and v have the same rank-q type."""
    budget = budget or Budget()
    return rank_type(u, q, budget) is rank_type(v, q, budget)


def game_equivalent(u: Word, v: Word, q: int,
                    cap: int = DEFAULT_GAME_CAP,
                    budget: Budget | None = None) -> bool:
    """Decide rank-q equivalence by direct game search (independent oracle).

    Explores the alternating move tree with memoization on the set of marked
    position pairs.  Exponential in general; refuses words longer than
    ``cap``.
    """
    if q < 0:
        raise ValueError("rank must be nonnegative")
    if max(len(u), len(v)) > cap:
        raise CapExceededError(
            f"game search capped at words of length {cap}; got {len(u)}, {len(v)}"
        )
    budget = budget or Budget()
    us = u.symbols()
    vs = v.symbols()
    memo: dict[tuple, bool] = {}

    def consistent(p: int, r: int, pairs: frozenset) -> bool:
        if us[p - 1] != vs[r - 1]:
            return False
        for a, b in pairs:
            if (p < a) != (r < b) or (p == a) != (r == b):
                return False
        return True

    def matcher_wins(pairs: frozenset, rounds: int) -> bool:
        if rounds == 0:
            return True
        key = (pairs, rounds)
        hit = memo.get(key)
        if hit is not None:
            return hit
        budget.spend()
        ok = True
        for p in range(1, len(us) + 1):
            if not any(consistent(p, r, pairs)
                       and matcher_wins(pairs | {(p, r)}, rounds - 1)
                       for r in range(1, len(vs) + 1)):
                ok = False
                break
        if ok:
            for r in range(1, len(vs) + 1):
                if not any(consistent(p, r, pairs)
                           and matcher_wins(pairs | {(p, r)}, rounds - 1)
                           for p in range(1, len(us) + 1)):
                    ok = False
                    break
        memo[key] = ok
        return ok

    return matcher_wins(frozenset(), q)


def rank_distance(u: Word, v: Word, budget: Budget | None = None) -> int:
    """Least q at which two distinct words become inequivalent.

    Always at least 1 (all words are rank-0 equivalent: the signature has no
    variable-free atoms).  The search is bounded by ceil(log2 max-length) + 4
    because an exact-word sentence of that rank separates any two distinct
    words; passing the bound would mean the type construction is broken.
    """
    if u.symbols() == v.symbols():
        raise ValueError("rank distance is defined only for distinct words")
    budget = budget or Budget()
    longest = max(len(u), len(v), 1)
    bound = max(1, (longest - 1).bit_length() + 4)
    for q in range(1, bound + 1):
        if rank_type(u, q, budget) is not rank_type(v, q, budget):
            return q
    raise RuntimeError(
        f"distinct words {u.text()!r}, {v.text()!r} still equivalent at rank "
        f"{bound}; type construction violated its separation bound"
    )


def block_power_shortcut(x: Word, m: int, m2: int, q: int) -> bool | None:
    """Sound fast path for comparing powers of one block.

    Returns True when the powers are certainly rank-q equivalent: either the
    exponents agree, or both are at least 2**q (marked block indices can then
    be matched by the long-orders interval strategy, with offsets copied
    verbatim).  Returns None when the sufficient condition does not apply -
    the threshold is not claimed to be necessary.
    """
    if len(x) == 0:
        raise ValueError("block must be nonempty")
    if m < 0 or m2 < 0 or q < 0:
        raise ValueError("exponents and rank must be nonnegative")
    if m == m2:
        return True
    if m >= 2**q and m2 >= 2**q:
        return True
    return None
