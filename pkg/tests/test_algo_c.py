import itertools
import random
from collections import defaultdict

import pytest

from markovbits.algo_c import (EMPTY, algorithm_c, class_size, rank, rank_fast, sigma, theta,
                               theta_table)
from markovbits.analysis import class_members
from markovbits.core import alpha, assign_bits
from markovbits.markov import count_matrix, decompose

from conftest import s


def order_key(seq):
    """Sort key of a class member: lane-final symbols, then the lanes without them."""
    lanes = decompose(seq).lanes
    tails = tuple(lane[-1] if lane else EMPTY for lane in lanes)
    return tails, tuple(x for lane in lanes for x in lane[:-1])


def brute_classes(n, N):
    groups = defaultdict(list)
    for seq in itertools.product(range(n), repeat=N):
        groups[(seq[0], count_matrix(seq, n))].append(seq)
    for members in groups.values():
        members.sort(key=order_key)
    return groups


@pytest.mark.parametrize("text, size, r, bits", [
    ("1211", 2, 0, "0"),
    ("1121", 2, 1, "1"),
    ("1212", 1, 0, ""),
])
def test_small_examples(text, size, r, bits):
    seq = s(text)
    assert class_size(seq) == size
    assert rank(seq) == r
    assert algorithm_c(seq) == bits


def test_theta_sigma():
    seq = s("1421323112341")
    assert theta(seq) == tuple(s("2341"))
    assert sigma(seq) == (tuple(s("431")), tuple(s("13")), tuple(s("21")), tuple(s("2")))
    assert theta([0, 0]) == (0,)
    assert theta([0, 0, 0]) == (0,)
    assert theta(s("112")) == (1, EMPTY)


def test_long_example_against_lane_permutations():
    seq = s("1421323112341")
    members = class_members(seq)
    assert class_size(seq) == len(members)
    assert members.index(tuple(seq)) == rank(seq) == rank_fast(seq)
    for m in members[:50]:
        assert class_size(m) == len(members)


def test_singletons():
    assert class_size([2]) == 1
    assert rank([2]) == rank_fast([2]) == 0
    assert algorithm_c([2]) == ""
    assert algorithm_c([]) == ""


def test_exhaustive_small_oracle():
    for n, top in ((1, 6), (2, 8), (3, 6)):
        for N in range(1, top + 1):
            for members in brute_classes(n, N).values():
                for i, seq in enumerate(members):
                    assert class_size(seq) == len(members)
                    assert rank(seq) == i


def test_theta_table_offsets():
    tails, offsets, total = theta_table(0, count_matrix(s("1421323112341")))
    assert list(tails) == sorted(tails)
    assert offsets[0] == 0
    assert all(a < b for a, b in zip(offsets, offsets[1:]))
    assert offsets[-1] < total


def test_rank_fast_agreement():
    rng = random.Random(12)
    for _ in range(10_000):
        n = rng.randint(1, 4)
        seq = [rng.randrange(n) for _ in range(rng.randint(1, 200))]
        assert rank_fast(seq) == rank(seq)


def test_long_input_tree_path():
    rng = random.Random(1)
    seq = [rng.randrange(3) for _ in range(5000)]
    r = rank(seq)
    assert 0 <= r < class_size(seq)
    assert algorithm_c(seq) == assign_bits(r, class_size(seq))


def test_optimal_class_totals():
    for n, N in ((2, 8), (3, 6)):
        for members in brute_classes(n, N).values():
            assert sum(len(algorithm_c(x)) for x in members) == alpha(len(members))
