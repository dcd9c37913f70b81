import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from markovbits.core import (Alphabet, alpha, assign_bits, multinomial, multiset_rank,
                             multiset_unrank, tree_rank)

from conftest import s


@pytest.mark.parametrize("n, expected", [(0, 0), (1, 0), (4, 8), (6, 10), (7, 10), (12, 32)])
def test_alpha(n, expected):
    assert alpha(n) == expected


@pytest.mark.parametrize("k", range(31))
def test_alpha_powers_of_two(k):
    assert alpha(2**k) == k * 2**k


def test_alpha_negative():
    with pytest.raises(ValueError):
        alpha(-1)


@pytest.mark.parametrize("rank, size, expected", [
    (3, 6, "11"),
    (4, 6, "0"),
    (5, 6, "1"),
    (0, 6, "00"),
    (0, 1, ""),
    (6, 7, ""),
])
def test_assign_bits(rank, size, expected):
    assert assign_bits(rank, size) == expected


@pytest.mark.parametrize("rank, size", [(-1, 3), (3, 3), (0, 0)])
def test_assign_bits_range(rank, size):
    with pytest.raises(ValueError):
        assign_bits(rank, size)


def test_assign_bits_balanced_and_optimal():
    for size in range(1, 2**12 + 1):
        outputs = Counter(assign_bits(r, size) for r in range(size))
        by_len = {}
        for y, c in outputs.items():
            by_len.setdefault(len(y), set()).add(c)
        for length, counts in by_len.items():
            assert len(counts) == 1
            assert sum(1 for y in outputs if len(y) == length) in (0, 2**length)
        assert sum(len(y) * c for y, c in outputs.items()) == alpha(size)


def test_assign_bits_odd_size_single_empty():
    for size in range(1, 200, 2):
        assert [assign_bits(r, size) for r in range(size)].count("") == 1


@pytest.mark.parametrize("counts, expected", [
    ([1, 1], 2),
    ([2, 1, 1], 12),
    ([6, 3, 3], 18480),  # brute-force count over all 3**12 strings
    ([], 1),
    ([0, 0, 5], 1),
])
def test_multinomial(counts, expected):
    assert multinomial(counts) == expected


def test_multinomial_large_matches_factorials():
    import math
    counts = [1500, 900, 700]
    expected = math.factorial(3100) // (math.factorial(1500) * math.factorial(900) * math.factorial(700))
    assert multinomial(counts) == expected


def _oracle_rank(seq):
    perms = sorted(set(itertools.permutations(seq)))
    return perms.index(tuple(seq))


@pytest.mark.parametrize("text, expected", [("1122", 0), ("2121", 4), ("2211", 5)])
def test_multiset_rank_examples(text, expected):
    assert multiset_rank(s(text)) == expected


def test_multiset_rank_matches_sorted_permutations():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 4)
        seq = [rng.randrange(n) for _ in range(rng.randint(0, 8))]
        assert multiset_rank(seq) == _oracle_rank(seq)


def test_unrank_out_of_range():
    with pytest.raises(ValueError):
        multiset_unrank([2, 2], 6)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=12))
def test_unrank_inverts_rank(seq):
    counts = [seq.count(i) for i in range(4)]
    assert multiset_unrank(counts, multiset_rank(seq)) == seq


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(0, 3), max_size=10), min_size=1, max_size=4))
def test_tree_rank_matches_mixed_radix(lanes):
    expected = 0
    for lane in lanes:
        counts = [lane.count(i) for i in range(4)]
        expected = expected * multinomial(counts) + multiset_rank(lane)
    assert tree_rank(lanes) == expected


def test_long_sequence_rank_paths_agree():
    rng = random.Random(3)
    seq = [rng.randrange(3) for _ in range(3000)]
    counts = [seq.count(i) for i in range(3)]
    assert multiset_unrank(counts, multiset_rank(seq)) == seq


def test_alphabet():
    a = Alphabet(("a", "b", "c"))
    assert a.encode(["c", "a"]) == [2, 0]
    assert a.decode([1]) == ["b"]
    with pytest.raises(KeyError):
        a.index("z")
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    assert Alphabet.of_size(3).names == ("0", "1", "2")
