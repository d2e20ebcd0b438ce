import itertools

import pytest

from rankprof.errors import UnboundVariableError
from rankprof.formulas import (
    And,
    Bottom,
    Equal,
    Exists,
    ForAll,
    HasLetter,
    Less,
    Not,
    Or,
    Top,
    distance_formula,
    evaluate,
    exact_word_formula,
    free_variables,
    horizon_classifier,
    length_formula,
    parse_sexpr,
    quantifier_rank,
    satisfies,
    satisfying_assignments,
    to_sexpr,
    tree_size,
)
from rankprof.words import Alphabet, Word

from .conftest import words_up_to

AB = Alphabet("ab")
UA = Alphabet("a")

# Fitted once on |w| in {4, 8, 16, 32}: measured size/|w|^2 peaks at 5.94.
CHI_SIZE_FACTOR = 6


def unary(m: int) -> Word:
    return Word(UA, (0,) * m)


class TestStructuralMeasures:
    def test_truth_rank_and_size(self):
        assert quantifier_rank(Top()) == 0
        assert tree_size(Top()) == 1

    def test_single_quantifier(self):
        phi = Exists("v0", Equal("v0", "v0"))
        assert quantifier_rank(phi) == 1
        assert tree_size(phi) == 2

    def test_nary_nodes_count_once(self):
        phi = And((Top(), Top(), Top()))
        assert tree_size(phi) == 4

    def test_successor_formula_rank_one(self):
        # x < y with nothing strictly between: one quantifier along the branch.
        phi = distance_formula(1)
        assert quantifier_rank(phi) == 1
        assert to_sexpr(phi) == (
            "(and (lt v0 v1) (not (exists v2 (and (lt v0 v2) (lt v2 v1)))))"
        )

    def test_variable_names_validated(self):
        with pytest.raises(ValueError):
            Less("x", "v1")
        with pytest.raises(ValueError):
            Exists("q3", Top())


class TestEvaluate:
    def test_letter_atom(self):
        assert evaluate(AB.word("ab"), HasLetter("a", "v0"), {"v0": 1})
        assert not evaluate(AB.word("ab"), HasLetter("a", "v0"), {"v0": 2})

    def test_empty_word_quantifiers(self):
        assert not evaluate(AB.epsilon(), Exists("v0", Top()))
        assert evaluate(AB.epsilon(), ForAll("v0", Bottom()))

    def test_first_position_macro(self):
        first = Not(Exists("v1", Less("v1", "v0")))
        assert evaluate(AB.word("ab"), first, {"v0": 1})
        assert not evaluate(AB.word("ab"), first, {"v0": 2})

    def test_unbound_variable_rejected(self):
        with pytest.raises(UnboundVariableError):
            evaluate(AB.word("ab"), Less("v0", "v1"), {"v0": 1})

    def test_assignment_positions_validated(self):
        with pytest.raises(ValueError):
            evaluate(AB.word("ab"), Equal("v0", "v0"), {"v0": 3})

    def test_shadowing(self):
        phi = Exists("v0", And((HasLetter("a", "v0"),
                                Exists("v0", HasLetter("b", "v0")))))
        assert evaluate(AB.word("ab"), phi)
        assert not evaluate(AB.word("aa"), phi)


class TestRelationalEvaluator:
    """satisfying_assignments must agree with the naive evaluator everywhere."""

    CASES = [
        distance_formula(3),
        Less("v0", "v1"),
        Equal("v0", "v0"),
        Not(Equal("v0", "v1")),
        Or((Less("v0", "v1"), Less("v1", "v0"))),
        And((Less("v0", "v1"), HasLetter("a", "v0"))),
        ForAll("v2", Or((Less("v2", "v0"), Equal("v2", "v0"), HasLetter("a", "v1")))),
        ForAll("v0", Or((HasLetter("a", "v0"), HasLetter("b", "v0")))),
        ForAll("v0", HasLetter("a", "v0")),
        Exists("v0", ForAll("v1", Not(Less("v1", "v0")))),
        ForAll("v0", ForAll("v0", HasLetter("a", "v0"))),
        length_formula(2),
        exact_word_formula(AB.word("ab")),
    ]

    @pytest.mark.parametrize("phi", CASES, ids=lambda p: to_sexpr(p)[:40])
    def test_against_naive(self, phi):
        cache = {}
        fv = sorted(free_variables(phi), key=lambda v: int(v[1:]))
        for word in words_up_to(AB, 4):
            variables, rows = satisfying_assignments(word, phi, cache)
            assert set(variables) == set(fv)
            got = {tuple(r[variables.index(v)] for v in fv) for r in rows}
            expect = {
                vals
                for vals in itertools.product(range(1, len(word) + 1), repeat=len(fv))
                if evaluate(word, phi, dict(zip(fv, vals)))
            }
            assert got == expect, (to_sexpr(phi), word)

    def test_satisfies_requires_sentence(self):
        with pytest.raises(UnboundVariableError):
            satisfies(AB.word("a"), Less("v0", "v1"))


class TestDistance:
    def test_zero_is_equality(self):
        assert to_sexpr(distance_formula(0)) == "(eq v0 v1)"
        assert quantifier_rank(distance_formula(0)) == 0

    def test_rank_bounds_small(self):
        for d in range(1, 130):
            bound = 1 if d == 1 else (d - 1).bit_length() + 1
            assert quantifier_rank(distance_formula(d)) <= bound

    def test_semantics_exhaustive_small(self):
        # Distance formulas never mention letters, so unary words cover all
        # models of each length.
        for d in range(0, 7):
            phi = distance_formula(d)
            for m in range(0, 9):
                w = unary(m)
                for i in range(1, m + 1):
                    for j in range(1, m + 1):
                        assert evaluate(w, phi, {"v0": i, "v1": j}) == (j == i + d)

    def test_letter_blind(self):
        def has_letter_atom(phi):
            if isinstance(phi, HasLetter):
                return True
            if isinstance(phi, Not):
                return has_letter_atom(phi.child)
            if isinstance(phi, (And, Or)):
                return any(has_letter_atom(c) for c in phi.children)
            if isinstance(phi, (Exists, ForAll)):
                return has_letter_atom(phi.child)
            return False

        assert not has_letter_atom(distance_formula(10))
        assert not has_letter_atom(length_formula(5))

    def test_forced_by_successors(self):
        w = AB.word("abab")
        assert evaluate(w, distance_formula(3), {"v0": 1, "v1": 4})
        assert not evaluate(w, distance_formula(3), {"v0": 2, "v1": 4})

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            distance_formula(-1)


class TestLength:
    def test_zero_sentence(self):
        lam = length_formula(0)
        assert to_sexpr(lam) == "(not (exists v0 (eq v0 v0)))"
        assert quantifier_rank(lam) == 1
        assert evaluate(UA.epsilon(), lam)
        assert not evaluate(unary(1), lam)

    def test_exact_length_contract(self):
        for m in range(0, 9):
            lam = length_formula(m)
            for k in range(0, 10):
                assert evaluate(unary(k), lam) == (k == m)

    def test_rank_bound(self):
        assert quantifier_rank(length_formula(4)) <= 5
        for m in range(1, 65):
            bound = 3 if m == 1 else (m - 1).bit_length() + 3
            assert quantifier_rank(length_formula(m)) <= bound


class TestExactWord:
    def test_separates_words(self):
        chi = exact_word_formula(AB.word("ab"))
        assert evaluate(AB.word("ab"), chi)
        for other in ("ba", "a", "abb"):
            assert not evaluate(AB.word(other), chi)

    def test_empty_word(self):
        chi = exact_word_formula(AB.epsilon())
        assert quantifier_rank(chi) == 1
        assert evaluate(AB.epsilon(), chi)
        assert not evaluate(AB.word("b"), chi)

    def test_rank_bound(self):
        assert quantifier_rank(exact_word_formula(AB.word("ab"))) <= 5
        assert quantifier_rank(exact_word_formula(unary(5))) <= 7
        for m in range(1, 33):
            bound = (m - 1).bit_length() + 4 if m > 1 else 5
            assert quantifier_rank(exact_word_formula(unary(m))) <= bound

    def test_size_quadratic(self):
        for m in (4, 8, 16, 32):
            assert tree_size(exact_word_formula(unary(m))) <= CHI_SIZE_FACTOR * m * m


class TestHorizonClassifier:
    def test_empty_members(self):
        phi = horizon_classifier([], 4)
        assert phi == Bottom()
        assert quantifier_rank(phi) == 0

    def test_single_epsilon(self):
        phi = horizon_classifier([UA.epsilon()], 3)
        assert phi == length_formula(0)
        assert quantifier_rank(phi) == 1

    def test_even_members_horizon_eight(self):
        members = [unary(m) for m in range(0, 9, 2)]
        phi = horizon_classifier(members, 8)
        assert quantifier_rank(phi) <= 7
        for k in range(0, 9):
            assert evaluate(unary(k), phi) == (k % 2 == 0)

    def test_member_too_long(self):
        with pytest.raises(ValueError):
            horizon_classifier([unary(5)], 4)

    def test_classifies_exactly_on_binary_ball(self):
        members = [w for w in words_up_to(AB, 3) if w.letters.count(0) == 1]
        phi = horizon_classifier(members, 3)
        cache = {}
        for w in words_up_to(AB, 3):
            assert satisfies(w, phi, cache) == (w in members)


class TestSexpr:
    ROUND_TRIP = [
        Top(),
        Bottom(),
        distance_formula(5),
        length_formula(3),
        exact_word_formula(AB.word("ab")),
        ForAll("v0", Or((HasLetter("a", "v0"), HasLetter("b", "v0")))),
    ]

    @pytest.mark.parametrize("phi", ROUND_TRIP, ids=lambda p: to_sexpr(p)[:32])
    def test_round_trip(self, phi):
        assert parse_sexpr(to_sexpr(phi)) == phi

    def test_grammar_shapes(self):
        assert to_sexpr(Less("v0", "v1")) == "(lt v0 v1)"
        assert to_sexpr(HasLetter("b", "v2")) == "(letter b v2)"
        assert to_sexpr(Or((Top(), Bottom()))) == "(or (true) (false))"

    def test_parse_rejects_garbage(self):
        for bad in ["", "(unknown)", "(lt v0)", "(true) (true)", "lt v0 v1"]:
            with pytest.raises((ValueError, IndexError)):
                parse_sexpr(bad)
