"""Information-optimal extraction from a finite trajectory.

All trajectories sharing the start state and the transition-count matrix
are equally likely.  This module counts that class exactly, ranks the input
inside it, and encodes the rank.  Members are ordered first by the vector
of lane-final symbols, then lexicographically by the concatenation of the
lanes with those finals removed.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

from .core import TREE_THRESHOLD, assign_bits, multinomial, multiset_rank, tree_rank
from .markov import ExitSequences, count_matrix, decompose, is_feasible

# tail symbol of an empty lane; sorts before every real symbol
EMPTY = -1

CountKey = tuple[tuple[int, ...], ...]


def theta(seq: Sequence[int]) -> tuple[int, ...]:
    return tuple(lane[-1] if lane else EMPTY for lane in decompose(seq).lanes)


def sigma(seq: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    return tuple(lane[:-1] for lane in decompose(seq).lanes)


def _canonical_lanes(K: CountKey, tails: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    lanes = []
    for row, t in zip(K, tails):
        lane = [j for j, k in enumerate(row) for _ in range(k)]
        if lane:
            lane.remove(t)
            lane.append(t)
        lanes.append(tuple(lane))
    return tuple(lanes)


@lru_cache(maxsize=65536)
def theta_table(start: int, K: CountKey) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...], int]:
    """Feasible tail vectors for ``(start, K)`` in increasing order.

    Returns ``(tails, offsets, total)`` where ``offsets[m]`` is the number of
    class members whose tail vector precedes ``tails[m]``.
    """
    options = [[j for j, k in enumerate(row) if k] or [EMPTY] for row in K]
    tails_out, offsets = [], []
    total = 0
    for tails in itertools.product(*options):
        E = ExitSequences(start, _canonical_lanes(K, tails))
        if not is_feasible(E)[0]:
            continue
        size = 1
        for row, t in zip(K, tails):
            if t != EMPTY:
                reduced = list(row)
                reduced[t] -= 1
                size *= multinomial(reduced)
        tails_out.append(tails)
        offsets.append(total)
        total += size
    return tuple(tails_out), tuple(offsets), total


def _key(seq: Sequence[int]) -> tuple[int, CountKey]:
    return seq[0], count_matrix(seq)


def class_size(seq: Sequence[int]) -> int:
    """Number of trajectories with the same start and transition counts."""
    return theta_table(*_key(seq))[2]


def _sigma_rank(lanes: Sequence[Sequence[int]], fast: bool) -> int:
    if fast or sum(len(lane) for lane in lanes) > TREE_THRESHOLD:
        return tree_rank(lanes)
    rank = 0
    for lane in lanes:
        rank = rank * multinomial(_counts(lane)) + (multiset_rank(lane) if lane else 0)
    return rank


def _counts(lane: Sequence[int]) -> list[int]:
    counts: dict[int, int] = {}
    for s in lane:
        counts[s] = counts.get(s, 0) + 1
    return list(counts.values())


def rank(seq: Sequence[int], fast: bool = False) -> int:
    """0-based position of ``seq`` inside its class.

    ``fast`` ranks the trimmed lanes with the product tree instead of the
    per-lane scan; both give the same value.
    """
    tails, offsets, _ = theta_table(*_key(seq))
    E = decompose(seq)
    t = tuple(lane[-1] if lane else EMPTY for lane in E.lanes)
    m = tails.index(t)
    return offsets[m] + _sigma_rank([lane[:-1] for lane in E.lanes], fast)


def rank_fast(seq: Sequence[int]) -> int:
    return rank(seq, fast=True)


def algorithm_c(seq: Sequence[int]) -> str:
    if len(seq) < 2:
        return ""
    tails, offsets, total = theta_table(*_key(seq))
    E = decompose(seq)
    t = tuple(lane[-1] if lane else EMPTY for lane in E.lanes)
    r = offsets[tails.index(t)] + _sigma_rank([lane[:-1] for lane in E.lanes], False)
    return assign_bits(r, total)
