"""Exact enumeration, counting-condition checks, efficiency curves and
statistical smoke tests for the extraction algorithms."""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erfc, gammaincc

from .algo_a import algorithm_a, algorithm_a_segmented, algorithm_a_split_stream
from .algo_b import algorithm_b
from .algo_c import EMPTY, algorithm_c
from .core import alpha, multinomial
from .extractors import DEFAULT_PERES_DEPTH, Extractor, get_extractor
from .markov import (ChainModel, ExitSequences, count_matrix, decompose, is_feasible, reconstruct,
                     stationary)

DEFAULT_BUDGET = 10**8

Algorithm = Callable[[Sequence[int]], str]


class BudgetExceeded(RuntimeError):
    pass


def concat_lanes(seq: Sequence[int], psi="elias", lanes: int | None = None) -> str:
    """Naive baseline: ``psi`` on each untrimmed exit lane, concatenated.

    ``lanes=1`` keeps only the first state's lane.  This does not produce
    unbiased bits in general; it exists to be caught by the checks here.
    """
    psi = get_extractor(psi)
    E = decompose(seq)
    chosen = E.lanes if lanes is None else E.lanes[:lanes]
    return "".join(psi(lane) for lane in chosen)


ALGORITHMS = ("a", "a-seg", "a-split", "b", "c", "vn", "elias", "peres",
              "concat", "concat1")


def get_algorithm(name: str, psi="elias", window=4, k: int = 16,
                  depth: int | None = None, split_rule: str = "position") -> Algorithm:
    """Resolve an algorithm name (see :data:`ALGORITHMS`) to a callable."""
    peres = Extractor("peres", depth or DEFAULT_PERES_DEPTH)
    if psi == "peres":
        psi = peres
    table: dict[str, Algorithm] = {
        "a": partial(algorithm_a, psi=psi),
        "a-seg": partial(algorithm_a_segmented, psi=psi),
        "a-split": partial(algorithm_a_split_stream, psi=psi, k=k, rule=split_rule),
        "b": partial(algorithm_b, psi=psi, window=window),
        "c": algorithm_c,
        "vn": get_extractor("vn"),
        "elias": get_extractor("elias"),
        "peres": peres,
        "concat": partial(concat_lanes, psi=psi),
        "concat1": partial(concat_lanes, psi=psi, lanes=1),
    }
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}") from None


def _trajectories(n: int, N: int, starts: Iterable[int], prefix: tuple[int, ...] = ()):
    for start in starts:
        for tail in itertools.product(range(n), repeat=N - 1 - len(prefix)):
            yield (start,) + prefix + tail


def _tally(n, N, starts, algorithm, prefix=()):
    tallies: dict = defaultdict(Counter)
    for seq in _trajectories(n, N, starts, prefix):
        tallies[(seq[0], count_matrix(seq, n))][algorithm(seq)] += 1
    return tallies


def _tally_all(n, N, starts, algorithm, workers=1):
    """``{(start, K): Counter(output -> count)}`` over all trajectories."""
    if workers <= 1 or N < 3:
        return _tally(n, N, starts, algorithm)
    from concurrent.futures import ProcessPoolExecutor

    merged: dict = defaultdict(Counter)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_tally, n, N, starts, algorithm, (x,)) for x in range(n)]
        for fut in futures:
            for key, outputs in fut.result().items():
                merged[key].update(outputs)
    return merged


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(f"{count} trajectories exceed the budget of {budget}")


def _phi(K, P):
    prob = 1
    for row, prow in zip(K, P):
        for k, p in zip(row, prow):
            if k:
                prob *= p ** k
    return prob


@dataclass
class EnumerationReport:
    """Exact output distribution of one algorithm on one chain."""

    probabilities: dict[str, Fraction]
    expected_length: Fraction
    trajectories: int
    group_counts: dict = field(default_factory=dict, repr=False)

    @property
    def total_probability(self):
        return sum(self.probabilities.values())

    def by_length(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = defaultdict(list)
        for y in self.probabilities:
            out[len(y)].append(y)
        return dict(sorted(out.items()))

    @property
    def uniform(self) -> bool:
        """Equal probability for every string of a given length."""
        for length, ys in self.by_length().items():
            probs = {self.probabilities[y] for y in ys if self.probabilities[y]}
            if not probs:
                continue
            if len(ys) != 2**length or len(probs) != 1:
                return False
        return True

    def to_text(self) -> str:
        """Machine-readable ``key=value`` lines."""
        lines = [
            f"trajectories={self.trajectories}",
            f"expected_length={float(self.expected_length):.9f}",
            f"expected_length_exact={self.expected_length}",
            f"total_probability={self.total_probability}",
            f"uniform={str(self.uniform).lower()}",
        ]
        for y in sorted(self.probabilities, key=lambda s: (len(s), s)):
            lines.append(f"p[{y or 'empty'}]={float(self.probabilities[y]):.7g}")
        return "\n".join(lines)

    def to_table(self) -> str:
        rows = [f"{'output':<12} probability"]
        for y in sorted(self.probabilities, key=lambda s: (len(s), s)):
            rows.append(f"{y or '(empty)':<12} {float(self.probabilities[y]):.7f}")
        rows.append(f"{'E[length]':<12} {float(self.expected_length):.3f}")
        return "\n".join(rows)


def enumerate_distribution(model: ChainModel, N: int, start: int, algorithm,
                           budget: int = DEFAULT_BUDGET, workers: int = 1) -> EnumerationReport:
    """Run ``algorithm`` on every length-``N`` trajectory from ``start`` and
    accumulate the exact output distribution.

    Trajectories are grouped by transition-count matrix: all members of a
    group share one probability, so the algorithm's outputs are tallied per
    group and weighted once at the end.
    """
    if isinstance(algorithm, str):
        algorithm = get_algorithm(algorithm)
    n = model.n
    _check_budget(n ** (N - 1), budget)
    tallies = {K: outputs for (_, K), outputs in _tally_all(n, N, [start], algorithm, workers).items()}
    count = n ** (N - 1)
    weight0 = model.start_probability(start)
    probs: dict[str, Fraction] = defaultdict(int)
    for K, outputs in sorted(tallies.items()):
        w = weight0 * _phi(K, model.transition)
        for y, c in outputs.items():
            probs[y] += c * w
    probs = dict(probs)
    expected = sum(len(y) * p for y, p in probs.items())
    return EnumerationReport(probs, expected, count, dict(tallies))


@dataclass
class CountingVerdict:
    passed: bool
    groups: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.passed


def verify_counting_condition(n: int, N: int, algorithm, starts: Iterable[int] | None = None,
                              budget: int = DEFAULT_BUDGET, workers: int = 1) -> CountingVerdict:
    """Chain-free unbiasedness check.

    Within every class of trajectories sharing start state and transition
    counts, each output string of a given length must be produced by the
    same number of trajectories.
    """
    if isinstance(algorithm, str):
        algorithm = get_algorithm(algorithm)
    starts = list(range(n)) if starts is None else list(starts)
    _check_budget(len(starts) * n ** (N - 1), budget)
    groups = _tally_all(n, N, starts, algorithm, workers)
    for (start, K), outputs in sorted(groups.items()):
        by_len: dict[int, dict[str, int]] = defaultdict(dict)
        for y, c in outputs.items():
            by_len[len(y)][y] = c
        for length, ys in by_len.items():
            if len(ys) != 2**length or len(set(ys.values())) != 1:
                return CountingVerdict(False, len(groups), {
                    "start": start, "K": K, "length": length, "counts": dict(sorted(ys.items())),
                })
    return CountingVerdict(True, len(groups))


def class_members(seq: Sequence[int]) -> list[tuple[int, ...]]:
    """Every trajectory with the same start and transition counts as ``seq``.

    Brute force: all independent rearrangements of the exit lanes, kept when
    a walk from the start consumes them completely.  Members are sorted by
    (lane-final symbols, lanes without their finals).
    """
    E = decompose(seq)
    members = []
    for lanes in itertools.product(*(distinct_permutations(lane) for lane in E.lanes)):
        ok, _ = is_feasible(ExitSequences(E.start, lanes))
        if ok:
            members.append(lanes)
    members.sort(key=_member_key)
    return [tuple(reconstruct(ExitSequences(E.start, lanes))) for lanes in members]


def _member_key(lanes):
    tails = tuple(lane[-1] if lane else EMPTY for lane in lanes)
    flat = tuple(s for lane in lanes for s in lane[:-1])
    return tails, flat


def distinct_permutations(items: Sequence[int]) -> list[tuple[int, ...]]:
    """Distinct permutations of a multiset, in lexicographic order."""
    counts = Counter(items)
    symbols = sorted(counts)
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec(left):
        if not left:
            out.append(tuple(prefix))
            return
        for s in symbols:
            if counts[s]:
                counts[s] -= 1
                prefix.append(s)
                rec(left - 1)
                prefix.pop()
                counts[s] += 1

    rec(len(items))
    return out


def optimal_expected_length(model: ChainModel, N: int, start: int,
                            budget: int = DEFAULT_BUDGET) -> Fraction:
    """Upper bound on expected output length at length ``N``:
    ``sum over classes of alpha(|class|) * class probability``."""
    n = model.n
    _check_budget(n ** (N - 1), budget)
    sizes = Counter(count_matrix(seq, n) for seq in _trajectories(n, N, [start]))
    w0 = model.start_probability(start)
    return sum(alpha(size) * w0 * _phi(K, model.transition) for K, size in sizes.items())


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def window_efficiency(row: Sequence, window: int):
    """Expected Elias output bits per input symbol for a ``window``-symbol
    block drawn i.i.d. from the distribution ``row``."""
    total = 0
    for ks in compositions(window, len(row)):
        prob = 1
        for p, k in zip(row, ks):
            if k:
                prob *= p ** k
        if prob:
            total += alpha(multinomial(ks)) * prob
    return total / window if isinstance(total, float) else Fraction(total, window)


def limiting_efficiency(model: ChainModel, window: int):
    """Long-run bits per symbol of the streaming extractor with a constant window."""
    u = stationary(model)
    return sum(ui * window_efficiency(row, window) for ui, row in zip(u, model.transition))


def efficiency_curve(model: ChainModel | int, windows: Iterable[int]) -> list[tuple[int, object]]:
    """``[(window, efficiency), ...]``; an int ``model`` means the uniform chain."""
    if isinstance(model, int):
        model = ChainModel.uniform(model)
    out = []
    for w in windows:
        if w < 2:
            raise ValueError("window size must be at least 2")
        out.append((w, limiting_efficiency(model, w)))
    return out


@dataclass
class StatTest:
    name: str
    statistic: float
    p_values: tuple[float, ...]

    def passed(self, significance: float) -> bool:
        return min(self.p_values) >= significance


@dataclass
class StatReport:
    n_bits: int
    tests: list[StatTest]
    significance: float = 1e-3

    @property
    def passed(self) -> bool:
        return all(t.passed(self.significance) for t in self.tests)

    def to_text(self) -> str:
        lines = [f"bits={self.n_bits}"]
        for t in self.tests:
            ps = ",".join(f"{p:.6g}" for p in t.p_values)
            lines.append(f"{t.name}: statistic={t.statistic:.6g} p={ps} "
                         f"{'pass' if t.passed(self.significance) else 'FAIL'}")
        return "\n".join(lines)


MIN_BITS = 10_000


def _as_array(bits) -> np.ndarray:
    if isinstance(bits, str):
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    return np.asarray(bits, dtype=np.uint8)


def monobit(bits) -> StatTest:
    b = _as_array(bits)
    s = abs(int(2 * b.sum()) - b.size) / math.sqrt(b.size)
    return StatTest("monobit", s, (float(erfc(s / math.sqrt(2))),))


def runs(bits) -> StatTest:
    b = _as_array(bits)
    n = b.size
    pi = b.mean()
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return StatTest("runs", float("nan"), (0.0,))
    v = 1 + int(np.count_nonzero(np.diff(b)))
    stat = abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi))
    return StatTest("runs", v, (float(erfc(stat)),))


def _psi_sq(b: np.ndarray, m: int) -> float:
    if m == 0:
        return 0.0
    n = b.size
    ext = np.concatenate([b, b[: m - 1]])
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j: j + n]
    freq = np.bincount(idx, minlength=2**m).astype(float)
    return float((2**m / n) * (freq ** 2).sum() - n)


def serial(bits, m: int = 2) -> StatTest:
    b = _as_array(bits)
    p0, p1, p2 = _psi_sq(b, m), _psi_sq(b, m - 1), _psi_sq(b, m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    return StatTest("serial", d1, (float(gammaincc(2 ** (m - 2), d1 / 2)),
                                   float(gammaincc(2 ** (m - 3), d2 / 2))))


def statistical_suite(bits, significance: float = 1e-3) -> StatReport:
    """Monobit frequency, serial (2-gram) and runs tests."""
    b = _as_array(bits)
    if b.size < MIN_BITS:
        raise ValueError(f"need at least {MIN_BITS} bits, got {b.size}")
    return StatReport(int(b.size), [monobit(b), serial(b), runs(b)], significance)
