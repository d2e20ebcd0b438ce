"""First-order formulas over word positions: AST, evaluation, and synthesis.

The signature has the strict order ``lt``, equality ``eq``, and one letter
predicate per alphabet symbol.  Formulas are plain trees (never shared DAGs),
so quantifier rank and tree size are honest structural measures.  Variables
are named ``v0, v1, ...``; synthesized formulas allocate them from a fresh
counter per call, so output is bit-for-bit reproducible.

Two evaluators are provided.  ``evaluate`` is the naive recursive search over
positions (cost up to |w|**rank) and is the reference semantics.
``satisfying_assignments`` computes the full satisfying relation of a formula
bottom-up with sparse joins; it exists so that large exhaustive checks of the
synthesized families stay cheap, and it is cross-validated against
``evaluate`` in the test suite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .errors import UnboundVariableError
from .words import Word

_VAR_PATTERN = re.compile(r"v[0-9]+$")


def _check_var(name: str) -> str:
    if not _VAR_PATTERN.match(name):
        raise ValueError(f"variable names must match v<digits>, got {name!r}")
    return name


@dataclass(frozen=True)
class Formula:
    """Base class; use the concrete node types below."""


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str

    def __post_init__(self):
        _check_var(self.left), _check_var(self.right)


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str

    def __post_init__(self):
        _check_var(self.left), _check_var(self.right)


@dataclass(frozen=True)
class HasLetter(Formula):
    """Position ``var`` carries alphabet symbol ``symbol``."""

    symbol: str
    var: str

    def __post_init__(self):
        _check_var(self.var)
        if not (isinstance(self.symbol, str) and len(self.symbol) == 1):
            raise ValueError(f"letter predicate needs a single symbol, got {self.symbol!r}")


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("conjunction needs at least one child (use Top)")


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("disjunction needs at least one child (use Bottom)")


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    child: Formula

    def __post_init__(self):
        _check_var(self.var)


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    child: Formula

    def __post_init__(self):
        _check_var(self.var)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


# An assignment maps variable names to 1-based word positions.
Assignment = dict[str, int]


def quantifier_rank(phi: Formula) -> int:
    """Maximum quantifier nesting depth."""
    if isinstance(phi, (Less, Equal, HasLetter, Top, Bottom)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.child)
    if isinstance(phi, (And, Or)):
        return max(quantifier_rank(c) for c in phi.children)
    if isinstance(phi, (Exists, ForAll)):
        return 1 + quantifier_rank(phi.child)
    raise TypeError(f"not a formula node: {phi!r}")


def tree_size(phi: Formula) -> int:
    """Node count of the formula tree (n-ary nodes count once)."""
    if isinstance(phi, (Less, Equal, HasLetter, Top, Bottom)):
        return 1
    if isinstance(phi, Not):
        return 1 + tree_size(phi.child)
    if isinstance(phi, (And, Or)):
        return 1 + sum(tree_size(c) for c in phi.children)
    if isinstance(phi, (Exists, ForAll)):
        return 1 + tree_size(phi.child)
    raise TypeError(f"not a formula node: {phi!r}")


def free_variables(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (Less, Equal)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, HasLetter):
        return frozenset((phi.var,))
    if isinstance(phi, (Top, Bottom)):
        return frozenset()
    if isinstance(phi, Not):
        return free_variables(phi.child)
    if isinstance(phi, (And, Or)):
        out: frozenset[str] = frozenset()
        for c in phi.children:
            out |= free_variables(c)
        return out
    if isinstance(phi, (Exists, ForAll)):
        return free_variables(phi.child) - {phi.var}
    raise TypeError(f"not a formula node: {phi!r}")


# ---------------------------------------------------------------------------
# Naive evaluation (reference semantics)


def evaluate(w: Word, phi: Formula, env: Assignment | None = None) -> bool:
    """Tarskian satisfaction by recursive search over positions.

    On the empty word every existential is false and every universal true.
    Raises UnboundVariableError when a free variable is missing from env.
    """
    env = dict(env or {})
    missing = free_variables(phi) - env.keys()
    if missing:
        raise UnboundVariableError(f"unbound free variables: {sorted(missing)}")
    m = len(w)
    for var, pos in env.items():
        if not 1 <= pos <= m:
            raise ValueError(f"assignment {var}->{pos} outside positions 1..{m}")
    return _eval(w, phi, env, m)


def _eval(w: Word, phi: Formula, env: Assignment, m: int) -> bool:
    if isinstance(phi, Less):
        return env[phi.left] < env[phi.right]
    if isinstance(phi, Equal):
        return env[phi.left] == env[phi.right]
    if isinstance(phi, HasLetter):
        return w.symbol_at(env[phi.var]) == phi.symbol
    if isinstance(phi, Not):
        return not _eval(w, phi.child, env, m)
    if isinstance(phi, And):
        return all(_eval(w, c, env, m) for c in phi.children)
    if isinstance(phi, Or):
        return any(_eval(w, c, env, m) for c in phi.children)
    if isinstance(phi, Exists):
        saved = env.get(phi.var)
        try:
            for pos in range(1, m + 1):
                env[phi.var] = pos
                if _eval(w, phi.child, env, m):
                    return True
            return False
        finally:
            if saved is None:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
    if isinstance(phi, ForAll):
        saved = env.get(phi.var)
        try:
            for pos in range(1, m + 1):
                env[phi.var] = pos
                if not _eval(w, phi.child, env, m):
                    return False
            return True
        finally:
            if saved is None:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    raise TypeError(f"not a formula node: {phi!r}")


# ---------------------------------------------------------------------------
# Relational evaluation (whole satisfying set at once)
#
# Every subtree is keyed by an alpha-canonical serialization: variables are
# tagged f0, f1, ... by first occurrence within the subtree, and quantifier
# nodes record which tag they project away.  Alpha-equivalent subtrees (the
# synthesized distance formulas contain many, under different variable names)
# then share one cached satisfying relation per word, which is what makes
# exhaustive semantic checks of the synthesized families affordable.


def _annotate(phi: Formula, out: dict) -> tuple[str, tuple[str, ...], bool]:
    """Fill out[id(node)] = (canonical key, variables in tag order, mentions letters).

    The variable tuple lists the free variables of the subtree in tag order;
    the cached relation for the subtree has one column per entry, in order.
    """
    if isinstance(phi, (Less, Equal)):
        head = "lt" if isinstance(phi, Less) else "eq"
        if phi.left == phi.right:
            result = (f"({head} f0 f0)", (phi.left,), False)
        else:
            result = (f"({head} f0 f1)", (phi.left, phi.right), False)
    elif isinstance(phi, HasLetter):
        result = (f"(letter {phi.symbol} f0)", (phi.var,), True)
    elif isinstance(phi, Top):
        result = ("(true)", (), False)
    elif isinstance(phi, Bottom):
        result = ("(false)", (), False)
    elif isinstance(phi, Not):
        key, free, lets = _annotate(phi.child, out)
        result = (f"(not {key})", free, lets)
    elif isinstance(phi, (And, Or)):
        tag = "and" if isinstance(phi, And) else "or"
        free_order: list[str] = []
        parts = []
        lets = False
        for child in phi.children:
            ckey, cfree, clets = _annotate(child, out)
            lets |= clets
            for name in cfree:
                if name not in free_order:
                    free_order.append(name)
            # Record the child's tag -> parent-tag map beside the child key
            # instead of rewriting the key, so child keys stay shared.
            positions = ",".join(str(free_order.index(name)) for name in cfree)
            parts.append(f"[{positions}]{ckey}")
        result = (f"({tag} {' '.join(parts)})", tuple(free_order), lets)
    elif isinstance(phi, (Exists, ForAll)):
        tag = "exists" if isinstance(phi, Exists) else "forall"
        ckey, cfree, lets = _annotate(phi.child, out)
        if phi.var in cfree:
            drop = cfree.index(phi.var)
            free = tuple(v for v in cfree if v != phi.var)
        else:
            drop = "-"
            free = cfree
        result = (f"({tag} {drop} {ckey})", free, lets)
    else:
        raise TypeError(f"not a formula node: {phi!r}")
    out[id(phi)] = result
    return result


def _space(m: int, k: int) -> set[tuple[int, ...]]:
    return set(product(range(1, m + 1), repeat=k))


def _join(arows, brows, on: list[tuple[int, int]], keep_b: list[int]):
    """Join two sets of position tuples; ``on`` pairs (a column, b column)."""
    a_cols = [i for i, _ in on]
    b_cols = [j for _, j in on]
    table: dict[tuple, list[tuple]] = {}
    for row in brows:
        table.setdefault(tuple(row[j] for j in b_cols), []).append(
            tuple(row[j] for j in keep_b)
        )
    out = set()
    for row in arows:
        for ext in table.get(tuple(row[i] for i in a_cols), ()):
            out.add(row + ext)
    return out


def satisfying_assignments(w: Word, phi: Formula,
                           cache: dict | None = None) -> tuple[tuple[str, ...], set[tuple[int, ...]]]:
    """All satisfying assignments of ``phi`` on ``w`` in one pass.

    Returns (variables, rows): the free variables of ``phi`` (in first
    occurrence order) and the set of satisfying position tuples.  A sentence
    returns ``((), {()})`` when true and ``((), set())`` when false.  Pass
    one ``cache`` dict across calls to share work between words and
    alpha-equivalent subformulas.
    """
    if cache is None:
        cache = {}
    annotations: dict = {}
    _, free, _ = _annotate(phi, annotations)
    rows = _sat(w, phi, annotations, cache)
    return free, rows


def satisfies(w: Word, phi: Formula, cache: dict | None = None) -> bool:
    """Sentence satisfaction via the relational evaluator."""
    variables, rows = satisfying_assignments(w, phi, cache)
    if variables:
        raise UnboundVariableError(f"not a sentence; free variables {variables}")
    return bool(rows)


def _reorder(rows: set, cols: tuple[str, ...], target: tuple[str, ...]) -> set:
    if cols == target:
        return rows
    perm = [cols.index(v) for v in target]
    return {tuple(row[i] for i in perm) for row in rows}


def _sat(w: Word, phi: Formula, annotations: dict, cache: dict) -> set[tuple[int, ...]]:
    """Rows of the satisfying relation, columns in the node's tag order."""
    key, free, lets = annotations[id(phi)]
    word_key = w.symbols() if lets else len(w)
    cached = cache.get((key, word_key))
    if cached is not None:
        return cached
    m = len(w)

    if isinstance(phi, Less):
        if phi.left == phi.right:
            rows = set()
        else:
            rows = {(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)}
    elif isinstance(phi, Equal):
        if phi.left == phi.right:
            rows = {(i,) for i in range(1, m + 1)}
        else:
            rows = {(i, i) for i in range(1, m + 1)}
    elif isinstance(phi, HasLetter):
        rows = {(i,) for i in range(1, m + 1) if w.symbol_at(i) == phi.symbol}
    elif isinstance(phi, Top):
        rows = {()}
    elif isinstance(phi, Bottom):
        rows = set()
    elif isinstance(phi, Not):
        rows = _space(m, len(free)) - _sat(w, phi.child, annotations, cache)
    elif isinstance(phi, And):
        rows = None
        cols: tuple[str, ...] = ()
        order = sorted(phi.children,
                       key=lambda c: len(_sat(w, c, annotations, cache)))
        for child in order:
            cfree = annotations[id(child)][1]
            crows = _sat(w, child, annotations, cache)
            if rows is None:
                rows, cols = crows, cfree
                continue
            on = [(cols.index(v), j) for j, v in enumerate(cfree) if v in cols]
            keep = [j for j, v in enumerate(cfree) if v not in cols]
            rows = _join(rows, crows, on, keep)
            cols = cols + tuple(cfree[j] for j in keep)
        if rows is None:
            raise AssertionError("conjunction with no children")
        rows = _reorder(rows, cols, free)
    elif isinstance(phi, Or):
        rows = set()
        for child in phi.children:
            cfree = annotations[id(child)][1]
            crows = _sat(w, child, annotations, cache)
            missing = tuple(v for v in free if v not in cfree)
            if missing:
                pad = _space(m, len(missing))
                crows = {row + ext for row in crows for ext in pad}
            rows |= _reorder(crows, cfree + missing, free)
    elif isinstance(phi, (Exists, ForAll)):
        cfree = annotations[id(phi.child)][1]
        crows = _sat(w, phi.child, annotations, cache)
        universal = isinstance(phi, ForAll)
        if phi.var in cfree:
            drop = cfree.index(phi.var)
            keep = [j for j in range(len(cfree)) if j != drop]
            if universal:
                if m == 0:
                    # Vacuously true, but assignments to other variables
                    # need positions to map to.
                    rows = {()} if not keep else set()
                else:
                    counts: dict[tuple, int] = {}
                    for row in crows:
                        rest = tuple(row[j] for j in keep)
                        counts[rest] = counts.get(rest, 0) + 1
                    rows = {rest for rest, hits in counts.items() if hits == m}
            else:
                rows = {tuple(row[j] for j in keep) for row in crows}
            rows = _reorder(rows, tuple(cfree[j] for j in keep), free)
        elif m == 0:
            # No positions: existentials are false, universals vacuously
            # true, but with free variables present no assignment exists.
            rows = ({()} if not cfree else set()) if universal else set()
        else:
            rows = _reorder(crows, cfree, free)
    else:
        raise TypeError(f"not a formula node: {phi!r}")

    cache[(key, word_key)] = rows
    return rows


# ---------------------------------------------------------------------------
# S-expression serialization (frozen external grammar)


def to_sexpr(phi: Formula) -> str:
    if isinstance(phi, Less):
        return f"(lt {phi.left} {phi.right})"
    if isinstance(phi, Equal):
        return f"(eq {phi.left} {phi.right})"
    if isinstance(phi, HasLetter):
        return f"(letter {phi.symbol} {phi.var})"
    if isinstance(phi, Not):
        return f"(not {to_sexpr(phi.child)})"
    if isinstance(phi, And):
        return f"(and {' '.join(to_sexpr(c) for c in phi.children)})"
    if isinstance(phi, Or):
        return f"(or {' '.join(to_sexpr(c) for c in phi.children)})"
    if isinstance(phi, Exists):
        return f"(exists {phi.var} {to_sexpr(phi.child)})"
    if isinstance(phi, ForAll):
        return f"(forall {phi.var} {to_sexpr(phi.child)})"
    if isinstance(phi, Top):
        return "(true)"
    if isinstance(phi, Bottom):
        return "(false)"
    raise TypeError(f"not a formula node: {phi!r}")


def parse_sexpr(text: str) -> Formula:
    """Inverse of to_sexpr; accepts exactly the frozen grammar."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> Formula:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos} in {text!r}")
        pos += 1
        head = tokens[pos]
        pos += 1
        if head == "true":
            node: Formula = Top()
        elif head == "false":
            node = Bottom()
        elif head in ("lt", "eq"):
            left, right = tokens[pos], tokens[pos + 1]
            pos += 2
            node = Less(left, right) if head == "lt" else Equal(left, right)
        elif head == "letter":
            symbol, var = tokens[pos], tokens[pos + 1]
            pos += 2
            node = HasLetter(symbol, var)
        elif head == "not":
            node = Not(parse())
        elif head in ("and", "or"):
            children = []
            while tokens[pos] != ")":
                children.append(parse())
            node = And(tuple(children)) if head == "and" else Or(tuple(children))
        elif head in ("exists", "forall"):
            var = tokens[pos]
            pos += 1
            child = parse()
            node = Exists(var, child) if head == "exists" else ForAll(var, child)
        else:
            raise ValueError(f"unknown head {head!r} in {text!r}")
        if tokens[pos] != ")":
            raise ValueError(f"expected ')' at token {pos} in {text!r}")
        pos += 1
        return node

    node = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return node


# ---------------------------------------------------------------------------
# Synthesis: distance, exact length, exact word, horizon classifier


class _Fresh:
    """Deterministic v<k> variable supply, one per synthesis call."""

    def __init__(self, start: int = 0):
        self.next_index = start

    def __call__(self) -> str:
        name = f"v{self.next_index}"
        self.next_index += 1
        return name


def _succ(x: str, y: str, fresh: _Fresh) -> Formula:
    z = fresh()
    return And((Less(x, y), Not(Exists(z, And((Less(x, z), Less(z, y)))))))


def _first(x: str, fresh: _Fresh) -> Formula:
    y = fresh()
    return Not(Exists(y, Less(y, x)))


def _last(x: str, fresh: _Fresh) -> Formula:
    y = fresh()
    return Not(Exists(y, Less(x, y)))


def _dist(x: str, y: str, d: int, fresh: _Fresh) -> Formula:
    if d == 0:
        return Equal(x, y)
    if d == 1:
        return _succ(x, y, fresh)
    z = fresh()
    left = _dist(x, z, d // 2, fresh)
    right = _dist(z, y, (d + 1) // 2, fresh)
    return Exists(z, And((left, right)))


def distance_formula(d: int) -> Formula:
    """Open formula in v0, v1 holding exactly when v1 = v0 + d.

    Built by balanced halving, so the quantifier rank is at most
    ceil(log2(d)) + 1 for d >= 1 (and 0 for d = 0) even though the tree
    has Theta(d) nodes.
    """
    if d < 0:
        raise ValueError("distance must be nonnegative")
    fresh = _Fresh()
    x, y = fresh(), fresh()
    return _dist(x, y, d, fresh)


def length_formula(m: int) -> Formula:
    """Sentence true exactly on words of length m.

    Pins the first and last positions and forces them m - 1 successor steps
    apart; rank at most ceil(log2(m)) + 3 for m >= 1, and exactly 1 for the
    empty-word sentence.
    """
    if m < 0:
        raise ValueError("length must be nonnegative")
    fresh = _Fresh()
    if m == 0:
        x = fresh()
        return Not(Exists(x, Equal(x, x)))
    f, last = fresh(), fresh()
    body = And((_first(f, fresh), _last(last, fresh), _dist(f, last, m - 1, fresh)))
    return Exists(f, Exists(last, body))


def exact_word_formula(w: Word) -> Formula:
    """Sentence true exactly on the word w (rank <= ceil(log2 |w|) + 4)."""
    m = len(w)
    if m == 0:
        return length_formula(0)
    fresh = _Fresh()
    f, last = fresh(), fresh()
    parts: list[Formula] = [
        _first(f, fresh),
        _last(last, fresh),
        _dist(f, last, m - 1, fresh),
    ]
    for i in range(1, m + 1):
        x = fresh()
        parts.append(Exists(x, And((_dist(f, x, i - 1, fresh), HasLetter(w.symbol_at(i), x)))))
    return Exists(f, Exists(last, And(tuple(parts))))


def horizon_classifier(members, n: int) -> Formula:
    """Disjunction of exact-word sentences for the given member set.

    Classifies the member set exactly on all words of length <= n; every
    member must itself fit inside the horizon.  An empty member set yields
    the rank-0 contradiction.
    """
    members = sorted(set(members), key=Word.sort_key)
    for w in members:
        if len(w) > n:
            raise ValueError(f"member {w.text()!r} longer than horizon {n}")
    if not members:
        return Bottom()
    disjuncts = tuple(exact_word_formula(w) for w in members)
    if len(disjuncts) == 1:
        return disjuncts[0]
    return Or(disjuncts)
