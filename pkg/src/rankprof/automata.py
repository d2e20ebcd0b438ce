"""Regular-language backend: regexes, minimal DFAs, transition monoids.

The pipeline is the textbook one - Thompson construction, subset
construction, partition-refinement minimization - with every product
canonicalized (states renumbered by breadth-first search in alphabet order)
so that identical inputs give bit-identical automata.

On top of the DFA sits its transition monoid with shortest length-then-lex
witness words per element.  For a minimal DFA this monoid is the syntactic
monoid, so distinct elements are separable by contexts; that is what the
cycle-witness extraction relies on: any element whose power sequence has
eventual period >= 2 yields context words r, s and a block x such that
membership of r x^k s alternates between residues of k forever.  Such a
witness converts directly into a logarithmic lower bound on the rank needed
to classify the language at horizon n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .budget import Budget
from .errors import (
    AlphabetMismatchError,
    CapExceededError,
    NoCycleWitnessError,
    RegexSyntaxError,
)
from .words import Alphabet, Word, concat, power

DEFAULT_MONOID_CAP = 5000


@dataclass(frozen=True)
class Dfa:
    """Complete deterministic automaton; delta[state][symbol_index] is total."""

    alphabet: Alphabet
    n_states: int
    start: int
    accepting: frozenset[int]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("a complete DFA needs at least one state")
        if not 0 <= self.start < self.n_states:
            raise ValueError("start state out of range")
        if any(not 0 <= s < self.n_states for s in self.accepting):
            raise ValueError("accepting state out of range")
        if len(self.delta) != self.n_states:
            raise ValueError("delta must have one row per state")
        for row in self.delta:
            if len(row) != len(self.alphabet):
                raise ValueError("delta rows must cover the whole alphabet")
            if any(not 0 <= t < self.n_states for t in row):
                raise ValueError("transition target out of range")

    def accepts(self, w: Word) -> bool:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatchError(
                f"word over {w.alphabet!r} fed to DFA over {self.alphabet!r}"
            )
        state = self.start
        for letter in w.letters:
            state = self.delta[state][letter]
        return state in self.accepting

    def state_after(self, state: int, w: Word) -> int:
        for letter in w.letters:
            state = self.delta[state][letter]
        return state


def membership(d: Dfa, w: Word) -> bool:
    """Run the DFA; true iff the final state accepts."""
    return d.accepts(w)


def complement(d: Dfa) -> Dfa:
    return Dfa(d.alphabet, d.n_states, d.start,
               frozenset(range(d.n_states)) - d.accepting, d.delta)


def _reachable(d: Dfa) -> list[int]:
    seen = [d.start]
    seen_set = {d.start}
    for s in seen:
        for t in d.delta[s]:
            if t not in seen_set:
                seen_set.add(t)
                seen.append(t)
    return seen


def _renumber(d: Dfa) -> Dfa:
    """Canonical state numbering: BFS from start in alphabet order."""
    order = _reachable(d)
    remap = {old: new for new, old in enumerate(order)}
    delta = tuple(tuple(remap[d.delta[old][c]] for c in range(len(d.alphabet)))
                  for old in order)
    accepting = frozenset(remap[s] for s in d.accepting if s in remap)
    return Dfa(d.alphabet, len(order), remap[d.start], accepting, delta)


def minimize(d: Dfa) -> Dfa:
    """Minimal complete DFA for the same language, canonically numbered."""
    d = _renumber(d)  # drop unreachable states first
    n, k = d.n_states, len(d.alphabet)
    block = [1 if s in d.accepting else 0 for s in range(n)]
    while True:
        signature = {}
        new_block = [0] * n
        for s in range(n):
            sig = (block[s], tuple(block[d.delta[s][c]] for c in range(k)))
            if sig not in signature:
                signature[sig] = len(signature)
            new_block[s] = signature[sig]
        if new_block == block:
            break
        block = new_block
    m = max(block) + 1
    delta_rows: list[tuple[int, ...]] = [()] * m
    for s in range(n):
        delta_rows[block[s]] = tuple(block[d.delta[s][c]] for c in range(k))
    accepting = frozenset(block[s] for s in d.accepting)
    merged = Dfa(d.alphabet, m, block[d.start], accepting, tuple(delta_rows))
    return _renumber(merged)


def extend_alphabet(d: Dfa, alphabet: Alphabet) -> Dfa:
    """Reinterpret the language over a larger alphabet (new symbols reject)."""
    for s in d.alphabet:
        if s not in alphabet:
            raise AlphabetMismatchError(f"symbol {s!r} missing from {alphabet!r}")
    if alphabet == d.alphabet:
        return d
    sink = d.n_states
    old_index = {s: i for i, s in enumerate(d.alphabet.symbols)}
    rows = []
    for s in range(d.n_states):
        rows.append(tuple(
            d.delta[s][old_index[sym]] if sym in old_index else sink
            for sym in alphabet.symbols
        ))
    rows.append(tuple(sink for _ in alphabet.symbols))
    return minimize(Dfa(alphabet, d.n_states + 1, d.start, d.accepting, tuple(rows)))


def intersection_witness(d1: Dfa, d2: Dfa) -> Word | None:
    """Shortest word accepted by both DFAs, or None if the languages are disjoint."""
    if d1.alphabet != d2.alphabet:
        raise AlphabetMismatchError("product requires a common alphabet")
    alpha = d1.alphabet
    start = (d1.start, d2.start)
    parents: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = [start]
    for pair in queue:
        s1, s2 = pair
        if s1 in d1.accepting and s2 in d2.accepting:
            letters: list[int] = []
            node = pair
            while parents[node] is not None:
                node, letter = parents[node]
                letters.append(letter)
            return Word(alpha, tuple(reversed(letters)))
        for c in range(len(alpha)):
            nxt = (d1.delta[s1][c], d2.delta[s2][c])
            if nxt not in parents:
                parents[nxt] = (pair, c)
                queue.append(nxt)
    return None


# ---------------------------------------------------------------------------
# DFA file format (flat JSON document, frozen field names)


def dfa_to_json(d: Dfa) -> dict:
    return {
        "alphabet": list(d.alphabet.symbols),
        "states": d.n_states,
        "start": d.start,
        "accept": sorted(d.accepting),
        "delta": [list(row) for row in d.delta],
    }


def dfa_from_json(data: dict) -> Dfa:
    try:
        alphabet = Alphabet(data["alphabet"])
        return Dfa(
            alphabet,
            int(data["states"]),
            int(data["start"]),
            frozenset(int(s) for s in data["accept"]),
            tuple(tuple(int(t) for t in row) for row in data["delta"]),
        )
    except KeyError as exc:
        raise ValueError(f"DFA document missing field {exc}") from None


def load_dfa(path) -> Dfa:
    with open(path, encoding="utf-8") as fh:
        return dfa_from_json(json.load(fh))


def save_dfa(d: Dfa, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dfa_to_json(d), fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Regex parsing (literals, |, juxtaposition, *, parentheses, @eps, @empty)

_METACHARS = set("|*()")


class _RegexParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise RegexSyntaxError(message, self.pos)

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self):
        node = self.alternation()
        if self.peek() is not None:
            self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def alternation(self):
        branches = [self.concatenation()]
        while self.peek() == "|":
            self.pos += 1
            branches.append(self.concatenation())
        node = branches[0]
        for b in branches[1:]:
            node = ("alt", node, b)
        return node

    def concatenation(self):
        parts = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)":
                break
            parts.append(self.repetition())
        if not parts:
            self.error("empty branch (write @eps for the empty word)")
        node = parts[0]
        for p in parts[1:]:
            node = ("cat", node, p)
        return node

    def repetition(self):
        node = self.atom()
        while self.peek() == "*":
            self.pos += 1
            node = ("star", node)
        return node

    def atom(self):
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of pattern")
        if ch == "(":
            self.pos += 1
            node = self.alternation()
            if self.peek() != ")":
                self.error("unbalanced parenthesis")
            self.pos += 1
            return node
        if ch == ")":
            self.error("unbalanced parenthesis")
        if ch == "*":
            self.error("nothing to repeat")
        if ch == "@":
            for token, tag in (("@eps", "eps"), ("@empty", "empty")):
                if self.text.startswith(token, self.pos):
                    self.pos += len(token)
                    return (tag,)
            self.error("unknown @-token (expected @eps or @empty)")
        if ch in _METACHARS or not ch.isprintable():
            self.error(f"cannot use {ch!r} as a literal")
        self.pos += 1
        return ("lit", ch)


def _literals(node) -> set[str]:
    tag = node[0]
    if tag == "lit":
        return {node[1]}
    if tag in ("alt", "cat"):
        return _literals(node[1]) | _literals(node[2])
    if tag == "star":
        return _literals(node[1])
    return set()


def _thompson(node, transitions: list, counter: list[int]) -> tuple[int, int]:
    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    tag = node[0]
    if tag == "lit":
        a, b = fresh(), fresh()
        transitions.append((a, node[1], b))
        return a, b
    if tag == "eps":
        a, b = fresh(), fresh()
        transitions.append((a, None, b))
        return a, b
    if tag == "empty":
        return fresh(), fresh()
    if tag == "cat":
        a1, b1 = _thompson(node[1], transitions, counter)
        a2, b2 = _thompson(node[2], transitions, counter)
        transitions.append((b1, None, a2))
        return a1, b2
    if tag == "alt":
        a, b = fresh(), fresh()
        a1, b1 = _thompson(node[1], transitions, counter)
        a2, b2 = _thompson(node[2], transitions, counter)
        transitions.extend([(a, None, a1), (a, None, a2), (b1, None, b), (b2, None, b)])
        return a, b
    if tag == "star":
        a, b = fresh(), fresh()
        a1, b1 = _thompson(node[1], transitions, counter)
        transitions.extend([(a, None, a1), (a, None, b), (b1, None, a1), (b1, None, b)])
        return a, b
    raise ValueError(f"unknown regex node {tag!r}")


def parse_regex(text: str, alphabet: Alphabet | None = None) -> Dfa:
    """Compile a regex to the minimal complete DFA of its language.

    The alphabet is inferred from the literals unless given explicitly; a
    pattern with no literals at all (for instance ``@empty``) defaults to the
    one-symbol alphabet ``a``.
    """
    ast = _RegexParser(text).parse()
    literals = _literals(ast)
    if alphabet is None:
        alphabet = Alphabet(sorted(literals)) if literals else Alphabet("a")
    else:
        for ch in literals:
            if ch not in alphabet:
                raise RegexSyntaxError(f"literal {ch!r} not in given alphabet", text.index(ch))

    transitions: list[tuple[int, str | None, int]] = []
    counter = [0]
    nfa_start, nfa_accept = _thompson(ast, transitions, counter)

    eps_next: dict[int, list[int]] = {}
    sym_next: dict[tuple[int, str], list[int]] = {}
    for src, sym, dst in transitions:
        if sym is None:
            eps_next.setdefault(src, []).append(dst)
        else:
            sym_next.setdefault((src, sym), []).append(dst)

    def closure(states: frozenset[int]) -> frozenset[int]:
        stack, seen = list(states), set(states)
        while stack:
            s = stack.pop()
            for t in eps_next.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    start = closure(frozenset({nfa_start}))
    subsets = {start: 0}
    order = [start]
    rows: list[tuple[int, ...]] = []
    for subset in order:
        row = []
        for sym in alphabet.symbols:
            moved = frozenset(t for s in subset for t in sym_next.get((s, sym), ()))
            nxt = closure(moved) if moved else frozenset()
            if nxt not in subsets:
                subsets[nxt] = len(order)
                order.append(nxt)
            row.append(subsets[nxt])
        rows.append(tuple(row))
    accepting = frozenset(i for i, subset in enumerate(order) if nfa_accept in subset)
    return minimize(Dfa(alphabet, len(order), 0, accepting, tuple(rows)))


# ---------------------------------------------------------------------------
# Transition monoid with word witnesses


@dataclass(frozen=True)
class EventualCycle:
    """Power-sequence shape of one monoid element: a**(index+period) == a**index."""

    element: int
    index: int
    period: int


class FiniteMonoid:
    """Transition monoid of a DFA, with shortest witness words per element.

    For a minimal DFA this is the syntactic monoid of the language, so any
    two distinct elements can be told apart by multiplying with suitable
    contexts and looking at acceptance.
    """

    def __init__(self, dfa: Dfa, cap: int = DEFAULT_MONOID_CAP,
                 budget: Budget | None = None):
        budget = budget or Budget()
        n = dfa.n_states
        identity = tuple(range(n))
        letter_actions = [
            tuple(dfa.delta[s][c] for s in range(n)) for c in range(len(dfa.alphabet))
        ]
        elements: list[tuple[int, ...]] = [identity]
        index_of: dict[tuple[int, ...], int] = {identity: 0}
        witnesses: list[Word] = [dfa.alphabet.epsilon()]
        for i, elem in enumerate(elements):
            for c, action in enumerate(letter_actions):
                budget.spend()
                composed = tuple(action[elem[s]] for s in range(n))
                if composed not in index_of:
                    if len(elements) >= cap:
                        raise CapExceededError(
                            f"transition monoid exceeds cap of {cap} elements"
                        )
                    index_of[composed] = len(elements)
                    elements.append(composed)
                    witnesses.append(Word(dfa.alphabet,
                                          witnesses[i].letters + (c,)))
        self.dfa = dfa
        self.elements = tuple(elements)
        self.witnesses = tuple(witnesses)
        self.identity = 0
        self._index_of = index_of
        self._letter_actions = letter_actions
        self._product_cache: dict[tuple[int, int], int] = {}
        self.accepting_elements = frozenset(
            i for i, elem in enumerate(elements) if elem[dfa.start] in dfa.accepting
        )

    def __len__(self) -> int:
        return len(self.elements)

    def multiply(self, i: int, j: int) -> int:
        """Index of the element acting like witness(i) followed by witness(j)."""
        hit = self._product_cache.get((i, j))
        if hit is not None:
            return hit
        left, right = self.elements[i], self.elements[j]
        composed = tuple(right[left[s]] for s in range(len(left)))
        result = self._index_of[composed]
        self._product_cache[(i, j)] = result
        return result

    def element_of_word(self, w: Word) -> int:
        if w.alphabet != self.dfa.alphabet:
            raise AlphabetMismatchError("word over a different alphabet")
        n = len(self.elements[0])
        action = tuple(self.dfa.state_after(s, w) for s in range(n))
        return self._index_of[action]

    def accepts_element(self, i: int) -> bool:
        return i in self.accepting_elements

    def power(self, i: int, exponent: int) -> int:
        result = self.identity
        for _ in range(exponent):
            result = self.multiply(result, i)
        return result

    def index_period(self, i: int) -> EventualCycle:
        """Least h >= 1 and p >= 1 with a**(h+p) == a**h, by power iteration."""
        seen: dict[int, int] = {}
        current = i
        exponent = 1
        while current not in seen:
            seen[current] = exponent
            current = self.multiply(current, i)
            exponent += 1
        return EventualCycle(i, seen[current], exponent - seen[current])

    @cached_property
    def cycles(self) -> tuple[EventualCycle, ...]:
        return tuple(self.index_period(i) for i in range(len(self.elements)))


def transition_monoid(d: Dfa, cap: int = DEFAULT_MONOID_CAP,
                      budget: Budget | None = None) -> FiniteMonoid:
    """Closure of the letter actions under composition, with witnesses."""
    return FiniteMonoid(d, cap=cap, budget=budget)


def is_aperiodic(m: FiniteMonoid) -> bool:
    """True iff every element's power sequence has eventual period 1."""
    return all(cycle.period == 1 for cycle in m.cycles)


# ---------------------------------------------------------------------------
# Cycle witnesses and the logarithmic lower bound they certify


@dataclass(frozen=True)
class CycleWitness:
    """Contexted power scheme with residue-dependent membership.

    For all t >= 0 the words ``left x**(index+i+t*period) right`` and
    ``left x**(index+j+t*period) right`` have opposite membership;
    ``accepting_residue`` records which of i, j lands inside the language.
    """

    left: Word
    block: Word
    right: Word
    index: int
    period: int
    residue_i: int
    residue_j: int
    accepting_residue: int

    def __post_init__(self):
        if len(self.block) == 0:
            raise ValueError("witness block must be nonempty")
        if self.period < 2:
            raise ValueError("witness period must be at least 2")
        if self.accepting_residue not in (self.residue_i, self.residue_j):
            raise ValueError("accepting residue must be one of the two residues")

    @property
    def context_length(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def block_length(self) -> int:
        return len(self.block)

    def word_at(self, exponent: int) -> Word:
        return concat(concat(self.left, power(self.block, exponent)), self.right)

    def min_defined_horizon(self) -> int:
        """Least n at which the lower bound below is defined."""
        return self.context_length + self.block_length * (
            self.period - 1 + max(self.index, 1)
        )

    def to_json(self) -> dict:
        return {
            "left": self.left.text(),
            "block": self.block.text(),
            "right": self.right.text(),
            "index": self.index,
            "period": self.period,
            "residue_i": self.residue_i,
            "residue_j": self.residue_j,
            "accepting_residue": self.accepting_residue,
            "context_length": self.context_length,
            "block_length": self.block_length,
            "defined_from": self.min_defined_horizon(),
        }


def verify_cycle_witness(d: Dfa, w: CycleWitness, repeats: int = 3) -> None:
    """Check the alternating-membership contract by direct DFA runs."""
    for t in range(repeats):
        in_i = d.accepts(w.word_at(w.index + w.residue_i + t * w.period))
        in_j = d.accepts(w.word_at(w.index + w.residue_j + t * w.period))
        if in_i == in_j:
            raise AssertionError(f"cycle witness fails to alternate at t={t}: {w}")
        accepted = w.residue_i if in_i else w.residue_j
        if accepted != w.accepting_residue:
            raise AssertionError(f"cycle witness polarity is wrong at t={t}: {w}")


def _witness_for_element(monoid: FiniteMonoid, cycle: EventualCycle) -> CycleWitness:
    """Best witness for one nonaperiodic element.

    Among all residue pairs and context pairs that separate, picks the one
    minimizing total context length, then context words, then residues; this
    greedily optimizes the additive constant of the certified lower bound.
    """
    h, p = cycle.index, cycle.period
    powers = [monoid.power(cycle.element, h + r) for r in range(p)]
    best = None
    size = len(monoid)
    context_order = sorted(
        range(size), key=lambda e: monoid.witnesses[e].sort_key()
    )
    for ml in context_order:
        wl = monoid.witnesses[ml]
        for mr in context_order:
            wr = monoid.witnesses[mr]
            c_len = len(wl) + len(wr)
            if best is not None and c_len > best[0]:
                continue
            for i in range(p):
                left_i = monoid.multiply(monoid.multiply(ml, powers[i]), mr)
                for j in range(i + 1, p):
                    if powers[i] == powers[j]:
                        continue
                    left_j = monoid.multiply(monoid.multiply(ml, powers[j]), mr)
                    acc_i = monoid.accepts_element(left_i)
                    acc_j = monoid.accepts_element(left_j)
                    if acc_i == acc_j:
                        continue
                    key = (c_len, wl.sort_key(), wr.sort_key(), i, j)
                    if best is None or key < best[:5]:
                        best = (c_len, wl.sort_key(), wr.sort_key(), i, j,
                                wl, wr, i if acc_i else j)
    if best is None:
        raise AssertionError(
            "no separating contexts found; the monoid is not syntactic"
        )
    _, _, _, i, j, wl, wr, acc = best
    witness = CycleWitness(
        left=wl,
        block=monoid.witnesses[cycle.element],
        right=wr,
        index=h,
        period=p,
        residue_i=i,
        residue_j=j,
        accepting_residue=acc,
    )
    verify_cycle_witness(monoid.dfa, witness)
    return witness


def cycle_witnesses(d: Dfa, monoid: FiniteMonoid | None = None) -> tuple[CycleWitness, ...]:
    """One validated witness per monoid element of eventual period >= 2.

    Ordered by block word (shortest first), so the first entry is the
    preferred witness.  Empty tuple when the monoid is aperiodic.
    """
    monoid = monoid or transition_monoid(d)
    candidates = [c for c in monoid.cycles if c.period >= 2]
    candidates.sort(key=lambda c: monoid.witnesses[c.element].sort_key())
    return tuple(_witness_for_element(monoid, c) for c in candidates)


def extract_cycle_witness(d: Dfa, monoid: FiniteMonoid | None = None) -> CycleWitness:
    """Preferred cycle witness (shortest block), or NoCycleWitnessError."""
    witnesses = cycle_witnesses(d, monoid)
    if not witnesses:
        raise NoCycleWitnessError(
            "the syntactic monoid is aperiodic; no cycle witness exists"
        )
    return witnesses[0]


def cycle_lower_bound(witness: CycleWitness, n: int) -> int | None:
    """Certified lower bound on the classification rank at horizon n.

    With K = floor((n - contexts) / block), the two words
    ``left x**k right`` realizing opposite membership can be chosen with
    exponents in a window of width period ending at K; both words then fit
    in the horizon and their exponents are at least K - period + 1, so ranks
    up to floor(log2(K - period + 1)) cannot tell them apart.  Returns None
    below the witness's defined horizon.
    """
    k = (n - witness.context_length) // witness.block_length
    window = k - witness.period + 1
    if window < max(witness.index, 1):
        return None
    return window.bit_length()
