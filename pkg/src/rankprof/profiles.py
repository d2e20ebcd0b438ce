"""Exact classification-rank and separator-rank profiles at desk scale.

The central quantity is, for a language L and horizon n, the least rank q
such that no two words of length <= n with opposite membership are rank-q
equivalent; equivalently the largest rank distance across any mixed pair in
the ball.  It is computed by grouping the whole ball by canonical rank type
at increasing q, which is exact and certifies itself with a maximizing word
pair.  A second, independently coded route goes through defect sets of the
recognizing monoid (accepting/rejecting element pairs realized by equivalent
words); the two must always agree.

``classify`` assembles the per-horizon report: exact values where the caps
allow, the universal ceil(log2 n) + 4 upper bound everywhere, and certified
cycle-witness lower bounds for languages whose syntactic monoid has a
nontrivial group.  The set of candidate witness schemes is infinite; we take
the max over the witnesses derived from every monoid element of period >= 2,
which is a sound partial bound.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from functools import cached_property

from .automata import (
    CycleWitness,
    Dfa,
    FiniteMonoid,
    complement,
    cycle_lower_bound,
    cycle_witnesses,
    dfa_from_json,
    extend_alphabet,
    intersection_witness,
    is_aperiodic,
    load_dfa,
    minimize,
    parse_regex,
    transition_monoid,
)
from .budget import Budget
from .errors import (
    BudgetExceededError,
    CapExceededError,
    HorizonTooLargeError,
    NotDisjointError,
)
from .eftypes import rank_type
from .words import DEFAULT_BALL_CAP, Alphabet, Word, enumerate_ball

PROFILE_SCHEMA = "rankprof.profile/1"
SEPARATOR_SCHEMA = "rankprof.separator/1"
DEFECTS_SCHEMA = "rankprof.defects/1"

BOUNDED = "bounded-starfree"
LOGARITHMIC = "logarithmic-nonaperiodic"

# Exact values stay affordable well past these, but the point of the tool is
# certified numbers, not heroics; beyond the cap rows carry bounds only.
DEFAULT_EXACT_HORIZON_UNARY = 64
DEFAULT_EXACT_HORIZON = 10

# The global-definability search walks (rank class, recognizer element) pairs.
# The number of rank-q classes over a 2+ letter alphabet grows violently with
# q (rank 3 already has hundreds of thousands), so the walk carries a
# deterministic cap on explored pairs.
DEFAULT_GLOBAL_PAIR_CAP = 20000


def universal_upper_bound(n: int) -> int:
    """ceil(log2 n) + 4: no language needs more rank at horizon n >= 1."""
    if n < 1:
        return 0
    return (n - 1).bit_length() + 4


class LanguageHandle:
    """A regular language pinned to its minimal complete DFA."""

    def __init__(self, dfa: Dfa, description: str):
        self.dfa = minimize(dfa)
        self.description = description

    @classmethod
    def from_regex(cls, text: str, alphabet: Alphabet | None = None) -> "LanguageHandle":
        return cls(parse_regex(text, alphabet), f"regex:{text}")

    @classmethod
    def from_dfa_file(cls, path) -> "LanguageHandle":
        return cls(load_dfa(path), f"dfa:{path}")

    @property
    def alphabet(self) -> Alphabet:
        return self.dfa.alphabet

    @cached_property
    def monoid(self) -> FiniteMonoid:
        return transition_monoid(self.dfa)

    def accepts(self, w: Word) -> bool:
        return self.dfa.accepts(w)

    def complemented(self) -> "LanguageHandle":
        return LanguageHandle(complement(self.dfa), f"complement({self.description})")

    def with_alphabet(self, alphabet: Alphabet) -> "LanguageHandle":
        if alphabet == self.alphabet:
            return self
        return LanguageHandle(extend_alphabet(self.dfa, alphabet), self.description)

    def __repr__(self) -> str:
        return f"LanguageHandle({self.description!r})"


# ---------------------------------------------------------------------------
# Built-in languages (constructed directly, no regex round trip)


def even_length_unary() -> LanguageHandle:
    alpha = Alphabet("a")
    dfa = Dfa(alpha, 2, 0, frozenset({0}), ((1,), (0,)))
    return LanguageHandle(dfa, "builtin:even")


def modular_unary(p: int, residues) -> LanguageHandle:
    """Unary words whose length falls in the given residue set mod p."""
    residues = sorted(set(residues))
    if p < 1:
        raise ValueError("modulus must be positive")
    if any(not 0 <= r < p for r in residues):
        raise ValueError(f"residues must lie in 0..{p - 1}")
    alpha = Alphabet("a")
    delta = tuple(((s + 1) % p,) for s in range(p))
    dfa = Dfa(alpha, p, 0, frozenset(residues), delta)
    name = ",".join(str(r) for r in residues)
    return LanguageHandle(dfa, f"builtin:mod:{p}:{name}")


def threshold_unary(t: int) -> LanguageHandle:
    """Unary words of length at least t."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    alpha = Alphabet("a")
    n = t + 1
    delta = tuple((min(s + 1, t),) for s in range(n))
    dfa = Dfa(alpha, n, 0, frozenset({t}), delta)
    return LanguageHandle(dfa, f"builtin:threshold:{t}")


def finite_language(texts, alphabet: Alphabet | None = None) -> LanguageHandle:
    """The finite language consisting exactly of the given words."""
    texts = list(texts)
    if alphabet is None:
        symbols = sorted({ch for t in texts if t != "@eps" for ch in t})
        alphabet = Alphabet(symbols) if symbols else Alphabet("a")
    words = [alphabet.word(t) for t in texts]
    # Trie plus sink, then minimize.
    nodes: dict[tuple[int, ...], int] = {(): 0}
    for w in words:
        for i in range(1, len(w) + 1):
            nodes.setdefault(w.letters[:i], len(nodes))
    sink = len(nodes)
    rows = []
    for prefix, _ in sorted(nodes.items(), key=lambda kv: kv[1]):
        rows.append(tuple(nodes.get(prefix + (c,), sink) for c in range(len(alphabet))))
    rows.append(tuple(sink for _ in range(len(alphabet))))
    accepting = frozenset(nodes[w.letters] for w in words)
    dfa = Dfa(alphabet, sink + 1, 0, accepting, tuple(rows))
    return LanguageHandle(dfa, "builtin:exact:" + ",".join(t for t in texts))


def builtin_language(spec: str) -> LanguageHandle:
    """Resolve a builtin spec: even, mod:p:r1,r2..., threshold:t, exact:w1,w2..."""
    if spec == "even":
        return even_length_unary()
    if spec.startswith("mod:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected mod:<p>:<residues>, got {spec!r}")
        p = int(parts[1])
        residues = [int(r) for r in parts[2].strip("{}").split(",") if r != ""]
        return modular_unary(p, residues)
    if spec.startswith("threshold:"):
        return threshold_unary(int(spec.split(":", 1)[1]))
    if spec.startswith("exact:"):
        return finite_language(spec.split(":", 1)[1].split(","))
    raise ValueError(f"unknown builtin language {spec!r}")


def language_from_spec(spec: str, alphabet: Alphabet | None = None) -> LanguageHandle:
    """Resolve a prefixed language spec: regex:..., dfa:<path>, builtin:..."""
    if spec.startswith("regex:"):
        return LanguageHandle.from_regex(spec[len("regex:"):], alphabet)
    if spec.startswith("dfa:"):
        return LanguageHandle.from_dfa_file(spec[len("dfa:"):])
    if spec.startswith("builtin:"):
        return builtin_language(spec[len("builtin:"):])
    raise ValueError(
        f"language spec needs a regex:/dfa:/builtin: prefix, got {spec!r}"
    )


# ---------------------------------------------------------------------------
# Exact profiles


def _ball_with_flags(lang: LanguageHandle, n: int, ball_cap: int):
    ball = list(enumerate_ball(lang.alphabet, n, cap=ball_cap))
    return ball, [lang.accepts(w) for w in ball]


def exact_rank(lang: LanguageHandle, n: int,
               ball_cap: int = DEFAULT_BALL_CAP,
               budget: Budget | None = None) -> tuple[int, tuple[Word, Word] | None]:
    """Least rank that classifies the language on all words of length <= n.

    Also returns a maximizing certificate pair (member, nonmember): two words
    in the ball that stay equivalent one rank below the answer.  Trivial
    horizons (the ball is all inside or all outside) give (0, None).
    """
    budget = budget or Budget()
    ball, flags = _ball_with_flags(lang, n, ball_cap)
    if all(flags) or not any(flags):
        return 0, None
    bound = universal_upper_bound(n)
    prev_pair: tuple[Word, Word] | None = None
    for q in range(1, bound + 1):
        mixed_pair = None
        seen: dict[int, tuple[Word | None, Word | None]] = {}
        for w, flag in zip(ball, flags):
            uid = rank_type(w, q, budget).uid
            member, nonmember = seen.get(uid, (None, None))
            if flag and member is None:
                member = w
            elif not flag and nonmember is None:
                nonmember = w
            seen[uid] = (member, nonmember)
            if mixed_pair is None and member is not None and nonmember is not None:
                mixed_pair = (member, nonmember)
        if mixed_pair is None:
            if prev_pair is None:
                # rank 1 separated everything; certificate from the rank-0
                # level, where the whole ball is one class.
                member = next(w for w, f in zip(ball, flags) if f)
                nonmember = next(w for w, f in zip(ball, flags) if not f)
                prev_pair = (member, nonmember)
            return q, prev_pair
        prev_pair = mixed_pair
    raise RuntimeError(
        f"rank search for {lang.description} exceeded the universal bound "
        f"{bound} at horizon {n}; the type construction is broken"
    )


@dataclass(frozen=True)
class DefectPair:
    accepting_element: int
    rejecting_element: int
    member: Word
    nonmember: Word


@dataclass(frozen=True)
class DefectSet:
    """Recognizer-element pairs still conflated by rank-q types on the ball."""

    language: str
    q: int
    n: int
    pairs: tuple[DefectPair, ...]

    def to_json(self, monoid: FiniteMonoid | None = None) -> dict:
        def name(idx: int) -> str | int:
            return monoid.witnesses[idx].text() if monoid is not None else idx

        return {
            "schema": DEFECTS_SCHEMA,
            "language": self.language,
            "q": self.q,
            "n": self.n,
            "pairs": [
                {
                    "accepting_element": name(p.accepting_element),
                    "rejecting_element": name(p.rejecting_element),
                    "member": p.member.text(),
                    "nonmember": p.nonmember.text(),
                }
                for p in self.pairs
            ],
        }


def defect_set(lang: LanguageHandle, q: int, n: int,
               ball_cap: int = DEFAULT_BALL_CAP,
               budget: Budget | None = None) -> DefectSet:
    """All (accepting, rejecting) element pairs realized by rank-q-equivalent
    word pairs within the horizon, each with one exhibited pair."""
    budget = budget or Budget()
    monoid = lang.monoid
    ball, flags = _ball_with_flags(lang, n, ball_cap)
    classes: dict[int, tuple[dict[int, Word], dict[int, Word]]] = {}
    for w, flag in zip(ball, flags):
        uid = rank_type(w, q, budget).uid
        members, nonmembers = classes.setdefault(uid, ({}, {}))
        elem = monoid.element_of_word(w)
        side = members if flag else nonmembers
        side.setdefault(elem, w)
    found: dict[tuple[int, int], DefectPair] = {}
    for members, nonmembers in classes.values():
        for e0, u in members.items():
            for e1, v in nonmembers.items():
                key = (e0, e1)
                if key not in found or (u.sort_key(), v.sort_key()) < (
                    found[key].member.sort_key(), found[key].nonmember.sort_key()
                ):
                    found[key] = DefectPair(e0, e1, u, v)
    pairs = tuple(found[key] for key in sorted(found))
    return DefectSet(lang.description, q, n, pairs)


def exact_rank_via_defects(lang: LanguageHandle, n: int,
                           ball_cap: int = DEFAULT_BALL_CAP,
                           budget: Budget | None = None) -> int:
    """Same value as exact_rank, found as the first q with an empty defect set."""
    budget = budget or Budget()
    bound = universal_upper_bound(n)
    for q in range(0, bound + 1):
        if not defect_set(lang, q, n, ball_cap, budget).pairs:
            return q
    raise RuntimeError(
        f"defect search for {lang.description} exceeded the universal bound "
        f"{bound} at horizon {n}"
    )


# ---------------------------------------------------------------------------
# Separator profiles


def _common_alphabet(k: LanguageHandle, h: LanguageHandle):
    if k.alphabet == h.alphabet:
        return k, h
    symbols = sorted(set(k.alphabet.symbols) | set(h.alphabet.symbols))
    union = Alphabet(symbols)
    return k.with_alphabet(union), h.with_alphabet(union)


def separator_rank(k: LanguageHandle, h: LanguageHandle, n: int,
                   ball_cap: int = DEFAULT_BALL_CAP,
                   budget: Budget | None = None) -> int:
    """Least rank at which no K-word and H-word of length <= n are equivalent.

    The languages must be disjoint on the ball; a shared word raises
    NotDisjointError naming it.  Zero when either side is empty there.
    """
    budget = budget or Budget()
    k, h = _common_alphabet(k, h)
    ball = list(enumerate_ball(k.alphabet, n, cap=ball_cap))
    in_k = [k.accepts(w) for w in ball]
    in_h = [h.accepts(w) for w in ball]
    for w, fk, fh in zip(ball, in_k, in_h):
        if fk and fh:
            raise NotDisjointError(w.text())
    if not any(in_k) or not any(in_h):
        return 0
    bound = universal_upper_bound(n)
    for q in range(1, bound + 1):
        seen: dict[int, list[bool]] = {}
        mixed = False
        for w, fk, fh in zip(ball, in_k, in_h):
            if not fk and not fh:
                continue
            uid = rank_type(w, q, budget).uid
            sides = seen.setdefault(uid, [False, False])
            sides[0] |= fk
            sides[1] |= fh
            if sides[0] and sides[1]:
                mixed = True
                break
        if not mixed:
            return q
    raise RuntimeError(
        f"separator search for {k.description} / {h.description} exceeded "
        f"the universal bound {bound} at horizon {n}"
    )


@dataclass(frozen=True)
class SeparatorRow:
    n: int
    rank: int
    upper: int


@dataclass(frozen=True)
class SeparatorReport:
    left: str
    right: str
    globally_disjoint: bool
    rows: tuple[SeparatorRow, ...]

    def to_json(self) -> dict:
        return {
            "schema": SEPARATOR_SCHEMA,
            "k": self.left,
            "h": self.right,
            "globally_disjoint": self.globally_disjoint,
            "rows": [{"n": r.n, "sigma": r.rank, "upper": r.upper} for r in self.rows],
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "sigma", "upper"])
        for r in self.rows:
            writer.writerow([r.n, r.rank, r.upper])
        return out.getvalue()


def separator_report(k: LanguageHandle, h: LanguageHandle,
                     max_n: int, min_n: int = 2,
                     ball_cap: int = DEFAULT_BALL_CAP,
                     budget: Budget | None = None) -> SeparatorReport:
    """Separator rank per horizon, plus a global product-DFA disjointness check."""
    budget = budget or Budget()
    ku, hu = _common_alphabet(k, h)
    disjoint = intersection_witness(ku.dfa, hu.dfa) is None
    rows = tuple(
        SeparatorRow(n, separator_rank(ku, hu, n, ball_cap, budget),
                     universal_upper_bound(n))
        for n in range(min_n, max_n + 1)
    )
    return SeparatorReport(k.description, h.description, disjoint, rows)


# ---------------------------------------------------------------------------
# Global definability search


def min_global_rank(lang: LanguageHandle, q_max: int | None = None,
                    budget: Budget | None = None,
                    pair_cap: int = DEFAULT_GLOBAL_PAIR_CAP) -> int | None:
    """Least q <= q_max at which the language is a union of rank-q classes
    over all of its alphabet's words, or None if no q <= q_max works.

    Works on the reachable part of (rank-q class, recognizer element) pairs
    under appending single letters: appending is well-defined on classes
    because equivalence is a congruence, and the search double-checks that on
    the representatives it actually visits.  Sound but incomplete above
    q_max; raises CapExceededError when some level cannot be closed within
    ``pair_cap`` explored pairs (over 2+ letter alphabets the number of rank-3
    classes is already beyond any practical cap).
    """
    found, _decided = _min_global_rank_search(lang, q_max, budget, pair_cap,
                                              swallow_cap=False)
    return found


def _min_global_rank_search(lang: LanguageHandle, q_max: int | None,
                            budget: Budget | None, pair_cap: int,
                            swallow_cap: bool) -> tuple[int | None, int]:
    """Level-by-level search; returns (least q or None, last fully decided q)."""
    budget = budget or Budget()
    if q_max is None:
        q_max = 6 if len(lang.alphabet) == 1 else 3
    decided = -1
    for q in range(0, q_max + 1):
        try:
            saturated = _globally_saturated(lang, q, budget, pair_cap)
        except (CapExceededError, BudgetExceededError):
            if swallow_cap:
                return None, decided
            raise
        decided = q
        if saturated:
            return q, decided
    return None, decided


def _globally_saturated(lang: LanguageHandle, q: int, budget: Budget,
                        pair_cap: int) -> bool:
    monoid = lang.monoid
    alpha = lang.alphabet
    letter_elems = [monoid.element_of_word(Word(alpha, (c,)))
                    for c in range(len(alpha))]
    eps = alpha.epsilon()
    t0 = rank_type(eps, q, budget)
    start = (t0.uid, monoid.identity)
    queue: list[tuple[int, int, Word]] = [(t0.uid, monoid.identity, eps)]
    seen = {start}
    acceptance: dict[int, set[bool]] = {}
    append_map: dict[tuple[int, int], int] = {}
    for t_uid, elem, rep in queue:
        budget.spend()
        flags = acceptance.setdefault(t_uid, set())
        flags.add(monoid.accepts_element(elem))
        if len(flags) == 2:
            return False
        for c in range(len(alpha)):
            rep2 = Word(alpha, rep.letters + (c,))
            t2 = rank_type(rep2, q, budget)
            known = append_map.get((t_uid, c))
            if known is None:
                append_map[(t_uid, c)] = t2.uid
            elif known != t2.uid:
                raise RuntimeError(
                    "appending a letter sent one rank class to two different "
                    "classes; type canonicalization is broken"
                )
            elem2 = monoid.multiply(elem, letter_elems[c])
            key = (t2.uid, elem2)
            if key not in seen:
                if len(seen) >= pair_cap:
                    raise CapExceededError(
                        f"global rank search at level {q} exceeds the cap of "
                        f"{pair_cap} reachable (class, element) pairs"
                    )
                seen.add(key)
                queue.append((t2.uid, elem2, rep2))
    return True


# ---------------------------------------------------------------------------
# Classification reports


@dataclass(frozen=True)
class ProfileRow:
    n: int
    exact: int | None          # None means skipped (cap), never silently dropped
    upper: int
    lower: int | None
    witness_pair: tuple[str, str] | None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "exact": "skipped" if self.exact is None else self.exact,
            "upper": self.upper,
            "lower": self.lower,
            "witness_pair": list(self.witness_pair) if self.witness_pair else None,
        }


@dataclass(frozen=True)
class ProfileReport:
    language: str
    alphabet: tuple[str, ...]
    classification: str
    witness: CycleWitness | None
    global_rank: int | None
    global_rank_cap: int | None
    # Last level whose saturation check actually closed; a None global_rank
    # together with decided < cap means the search was capped, not exhausted.
    global_rank_decided_up_to: int | None
    rows: tuple[ProfileRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if row.exact is not None:
                if row.exact > row.upper or (row.lower is not None and row.lower > row.exact):
                    raise AssertionError(
                        f"certified bounds violated at n={row.n}: "
                        f"lower={row.lower} exact={row.exact} upper={row.upper}"
                    )

    @property
    def has_skipped_rows(self) -> bool:
        return any(row.exact is None for row in self.rows)

    def to_json(self) -> dict:
        return {
            "schema": PROFILE_SCHEMA,
            "language": self.language,
            "alphabet": list(self.alphabet),
            "classification": self.classification,
            "witness": self.witness.to_json() if self.witness else None,
            "global_rank": self.global_rank,
            "global_rank_cap": self.global_rank_cap,
            "global_rank_decided_up_to": self.global_rank_decided_up_to,
            "rows": [row.to_json() for row in self.rows],
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "exact", "lower", "upper", "witness_u", "witness_v"])
        for r in self.rows:
            pair = r.witness_pair or ("", "")
            writer.writerow([
                r.n,
                "skipped" if r.exact is None else r.exact,
                "" if r.lower is None else r.lower,
                r.upper,
                pair[0],
                pair[1],
            ])
        return out.getvalue()

    def to_plot(self) -> str:
        """Frozen four-column table for plotting: n, exact, lower, upper."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "exact", "lower", "upper"])
        for r in self.rows:
            writer.writerow([
                r.n,
                "" if r.exact is None else r.exact,
                "" if r.lower is None else r.lower,
                r.upper,
            ])
        return out.getvalue()


def classify(lang: LanguageHandle, max_n: int, min_n: int = 2,
             exact_horizon: int | None = None,
             q_max: int | None = None,
             ball_cap: int = DEFAULT_BALL_CAP,
             budget: Budget | None = None) -> ProfileReport:
    """Full report: dichotomy class, witness data, and per-horizon bounds.

    Aperiodic languages are classified bounded; a global defining rank is
    attached when the bounded search finds one within q_max.  Nonaperiodic
    languages get the preferred cycle witness and per-horizon certified
    lower bounds (the max over all extracted witnesses).  Exact values are
    computed for horizons up to ``exact_horizon`` (default 64 unary, 10
    otherwise); beyond that, rows keep the cheap bound columns and mark the
    exact column skipped.
    """
    if min_n < 1 or min_n > max_n:
        raise ValueError("need 1 <= min_n <= max_n")
    budget = budget or Budget()
    if exact_horizon is None:
        exact_horizon = (DEFAULT_EXACT_HORIZON_UNARY if len(lang.alphabet) == 1
                         else DEFAULT_EXACT_HORIZON)
    monoid = lang.monoid
    aperiodic = is_aperiodic(monoid)
    if aperiodic:
        classification = BOUNDED
        witnesses: tuple[CycleWitness, ...] = ()
        best = None
        if q_max is None:
            q_max = 6 if len(lang.alphabet) == 1 else 3
        global_rank, decided = _min_global_rank_search(
            lang, q_max, budget, DEFAULT_GLOBAL_PAIR_CAP, swallow_cap=True
        )
    else:
        classification = LOGARITHMIC
        witnesses = cycle_witnesses(lang.dfa, monoid)
        best = witnesses[0]
        global_rank = None
        q_max = None
        decided = None

    rows = []
    for n in range(min_n, max_n + 1):
        lower = None
        if witnesses:
            bounds = [cycle_lower_bound(w, n) for w in witnesses]
            defined = [b for b in bounds if b is not None]
            lower = max(defined) if defined else None
        exact = None
        pair_texts = None
        if n <= exact_horizon:
            try:
                value, pair = exact_rank(lang, n, ball_cap, budget)
                exact = value
                if pair is not None:
                    pair_texts = (pair[0].text(), pair[1].text())
            except (HorizonTooLargeError, BudgetExceededError):
                exact = None
        rows.append(ProfileRow(n, exact, universal_upper_bound(n), lower, pair_texts))

    return ProfileReport(
        language=lang.description,
        alphabet=lang.alphabet.symbols,
        classification=classification,
        witness=best,
        global_rank=global_rank,
        global_rank_cap=q_max,
        global_rank_decided_up_to=decided,
        rows=tuple(rows),
    )


def report_to_text(report: ProfileReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2) + "\n"
    if fmt == "csv":
        return report.to_csv()
    if fmt == "plot":
        return report.to_plot()
    raise ValueError(f"unknown format {fmt!r}")
