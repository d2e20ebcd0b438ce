import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankprof.errors import AlphabetMismatchError, HorizonTooLargeError
from rankprof.words import Alphabet, Word, ball_size, concat, enumerate_ball, power

from .conftest import words_up_to

AB = Alphabet("ab")


def w(text: str) -> Word:
    return AB.word(text)


class TestAlphabet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Alphabet("aa")

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Alphabet("")

    def test_rejects_nonprintable(self):
        with pytest.raises(ValueError):
            Alphabet(["a", "\t"])

    def test_value_equality(self):
        assert Alphabet("ab") == Alphabet("ab")
        assert Alphabet("ab") != Alphabet("ba")


class TestWordBasics:
    def test_parse_and_serialize(self):
        assert w("ab").text() == "ab"
        assert w("@eps").text() == "@eps"
        assert len(w("@eps")) == 0
        assert str(w("ab")) == "ab"

    def test_symbol_at_is_one_based(self):
        word = w("ab")
        assert word.symbol_at(1) == "a"
        assert word.symbol_at(2) == "b"
        with pytest.raises(IndexError):
            word.symbol_at(0)
        with pytest.raises(IndexError):
            word.symbol_at(3)

    def test_unknown_symbol(self):
        with pytest.raises(ValueError):
            AB.word("abc")

    def test_canonical_order_is_length_then_lex(self):
        ws = [w("b"), w("aa"), w("@eps"), w("a"), w("ab")]
        assert [x.text() for x in sorted(ws)] == ["@eps", "a", "b", "aa", "ab"]

    def test_cross_alphabet_order_rejected(self):
        with pytest.raises(AlphabetMismatchError):
            _ = w("a") < Alphabet("a").word("a")


class TestConcatPower:
    def test_epsilon_is_identity(self):
        assert concat(AB.epsilon(), w("ab")) == w("ab")
        assert concat(w("ab"), AB.epsilon()) == w("ab")

    def test_concat_definition(self):
        assert concat(w("ab"), w("ba")) == w("abba")

    def test_concat_of_power(self):
        assert concat(power(AB.word("a"), 2), w("b")) == w("aab")

    def test_power_examples(self):
        assert power(w("ab"), 3) == w("ababab")
        assert power(w("a"), 0) == AB.epsilon()
        assert power(AB.epsilon(), 5) == AB.epsilon()

    def test_power_rejects_negative(self):
        with pytest.raises(ValueError):
            power(w("a"), -1)

    def test_alphabet_mismatch_fails_early(self):
        with pytest.raises(AlphabetMismatchError):
            concat(w("a"), Alphabet("a").word("a"))

    @given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
    def test_concat_associative(self, i, j, k):
        ws = words_up_to(AB, 2)
        u, v, x = ws[i], ws[j], ws[k]
        assert concat(concat(u, v), x) == concat(u, concat(v, x))

    @given(st.integers(0, 6), st.integers(0, 5))
    def test_power_recurrence(self, i, m):
        x = words_up_to(AB, 2)[i]
        assert power(x, m + 1) == concat(power(x, m), x)


class TestBall:
    def test_unary_ball(self, unary):
        got = [x.text() for x in enumerate_ball(unary, 3)]
        assert got == ["@eps", "a", "aa", "aaa"]

    def test_binary_ball_count(self):
        assert len(list(enumerate_ball(AB, 2))) == 7

    def test_zero_horizon(self):
        assert [x.text() for x in enumerate_ball(AB, 0)] == ["@eps"]

    def test_order_and_distinctness(self):
        ws = list(enumerate_ball(AB, 3))
        assert ws == sorted(ws)
        assert len(set(ws)) == len(ws)

    @pytest.mark.parametrize("k,n", [(1, 5), (2, 6), (3, 4)])
    def test_count_matches_closed_form(self, k, n):
        alpha = Alphabet("abc"[:k])
        assert len(list(enumerate_ball(alpha, n))) == ball_size(k, n)

    def test_cap_refuses_loudly(self):
        with pytest.raises(HorizonTooLargeError):
            list(enumerate_ball(AB, 30))
        # a custom cap triggers earlier
        with pytest.raises(HorizonTooLargeError):
            list(enumerate_ball(AB, 3, cap=8))

    def test_negative_horizon(self):
        with pytest.raises(ValueError):
            list(enumerate_ball(AB, -1))
