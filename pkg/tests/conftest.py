import itertools

import pytest

from rankprof.words import Alphabet, Word


@pytest.fixture(scope="session")
def ab() -> Alphabet:
    return Alphabet("ab")


@pytest.fixture(scope="session")
def unary() -> Alphabet:
    return Alphabet("a")


def words_up_to(alphabet: Alphabet, n: int) -> list[Word]:
    """All words of length <= n in canonical order (test-local convenience)."""
    out = []
    for length in range(n + 1):
        for combo in itertools.product(range(len(alphabet)), repeat=length):
            out.append(Word(alphabet, combo))
    return out
