"""Exit sequences of trajectories, feasibility, and chain models."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Alphabet


class Infeasible(ValueError):
    """Raised when exit sequences do not describe any trajectory."""


class NotIrreducible(ValueError):
    pass


@dataclass(frozen=True)
class ExitSequences:
    """Start state plus, for each state ``i``, the states that followed it."""

    start: int
    lanes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "lanes", tuple(tuple(lane) for lane in self.lanes))
        n = len(self.lanes)
        if not 0 <= self.start < n:
            raise ValueError(f"start state {self.start} outside alphabet of size {n}")
        for lane in self.lanes:
            for s in lane:
                if not 0 <= s < n:
                    raise ValueError(f"symbol {s} outside alphabet of size {n}")

    @property
    def n(self) -> int:
        return len(self.lanes)

    def __len__(self):
        # length of the trajectory these lanes describe
        return 1 + sum(len(lane) for lane in self.lanes)

    def count_matrix(self) -> tuple[tuple[int, ...], ...]:
        n = self.n
        rows = []
        for lane in self.lanes:
            row = [0] * n
            for s in lane:
                row[s] += 1
            rows.append(tuple(row))
        return tuple(rows)

    def replace_lane(self, i: int, lane: Sequence[int]) -> "ExitSequences":
        lanes = list(self.lanes)
        lanes[i] = tuple(lane)
        return ExitSequences(self.start, tuple(lanes))


def decompose(seq: Sequence[int], n: int | None = None) -> ExitSequences:
    if not len(seq):
        raise ValueError("trajectory must contain at least one symbol")
    if n is None:
        n = max(seq) + 1
    lanes: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(seq, seq[1:]):
        lanes[a].append(b)
    return ExitSequences(seq[0], tuple(tuple(lane) for lane in lanes))


def count_matrix(seq: Sequence[int], n: int | None = None) -> tuple[tuple[int, ...], ...]:
    """``K[i][j]`` = number of ``i -> j`` transitions in ``seq``."""
    if n is None:
        n = max(seq) + 1
    K = [[0] * n for _ in range(n)]
    for a, b in zip(seq, seq[1:]):
        K[a][b] += 1
    return tuple(tuple(row) for row in K)


def _walk(E: ExitSequences) -> tuple[list[int], bool]:
    # follow the lowest unused label out of each state
    pos = [0] * E.n
    lanes = E.lanes
    c = E.start
    out = [c]
    while pos[c] < len(lanes[c]):
        nxt = lanes[c][pos[c]]
        pos[c] += 1
        out.append(nxt)
        c = nxt
    return out, len(out) == len(E)


def reconstruct(E: ExitSequences) -> list[int]:
    """Inverse of :func:`decompose`; raises :class:`Infeasible` if the lanes
    cannot be consumed by a single walk from the start state."""
    out, complete = _walk(E)
    if not complete:
        raise Infeasible(
            f"walk stopped at state {out[-1]} after {len(out)} of {len(E)} symbols"
        )
    return out


def is_feasible(E: ExitSequences) -> tuple[bool, int | None]:
    """Return ``(True, end_state)`` if a complete walk exists, else ``(False, None)``."""
    out, complete = _walk(E)
    return (True, out[-1]) if complete else (False, None)


def sequence_graph(E: ExitSequences) -> list[tuple[int, int, int]]:
    """Labelled edges ``(src, dst, label)`` of the sequence graph.

    Vertex 0 is the virtual source; state ``i`` is vertex ``i + 1``.
    Labels of each vertex's out-edges run ``1..out_degree``.
    """
    edges = [(0, E.start + 1, 1)]
    for i, lane in enumerate(E.lanes):
        edges.extend((i + 1, s + 1, k) for k, s in enumerate(lane, start=1))
    return edges


def tail_fixed_permute(
    E: ExitSequences, lane: int, permutation: Sequence[int], tail_fixed: bool = True
) -> ExitSequences:
    """Reorder one lane: new lane is ``[old[p] for p in permutation]``.

    With ``tail_fixed`` the last symbol must stay the same.  Feasibility of
    the result is not checked.
    """
    old = E.lanes[lane]
    if sorted(permutation) != list(range(len(old))):
        raise ValueError(
            f"permutation {list(permutation)} does not match lane of length {len(old)}"
        )
    new = [old[p] for p in permutation]
    if tail_fixed and new and new[-1] != old[-1]:
        raise ValueError(f"permutation moves the last symbol of lane {lane}")
    return E.replace_lane(lane, new)


def _as_number(x):
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return float(x)


@dataclass(frozen=True)
class ChainModel:
    """Row-stochastic transition matrix and an optional start distribution.

    Entries given as ``int``, ``Fraction`` or strings (``"1/3"``,
    ``"0.25"``) are kept exact; any float entry makes the model a float
    model.  ``start`` is a state index, a distribution vector, or ``None``
    (probabilities are then conditional on the first symbol).

    Rows must sum to 1 exactly (exact models) or within 1e-12 (float
    models).  ``normalize`` rescales each row first; ``tolerance`` accepts
    rows within that distance of 1 unchanged, for matrices published with
    rounded entries.
    """

    transition: tuple[tuple, ...]
    start: int | tuple | None = None
    states: tuple[str, ...] | None = None
    normalize: bool = field(default=False, compare=False)
    tolerance: float | None = field(default=None, compare=False)

    def __post_init__(self):
        rows = [[_as_number(p) for p in row] for row in self.transition]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("transition matrix must be square and non-empty")
        exact = all(isinstance(p, Fraction) for r in rows for p in r)
        if not exact:
            rows = [[float(p) for p in r] for r in rows]
        for i, r in enumerate(rows):
            if any(p < 0 for p in r):
                raise ValueError(f"row {i} has a negative entry")
            total = sum(r)
            if self.normalize and total > 0:
                rows[i] = r = [p / total for p in r]
                total = sum(r)
            if self.tolerance is not None:
                ok = abs(total - 1) <= self.tolerance
            else:
                ok = total == 1 if exact else abs(total - 1.0) <= 1e-12
            if not ok:
                raise ValueError(f"row {i} sums to {total}, not 1")
        object.__setattr__(self, "transition", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "normalize", False)
        if self.start is not None and not isinstance(self.start, int):
            dist = tuple(_as_number(p) for p in self.start)
            if len(dist) != n:
                raise ValueError("start distribution has wrong length")
            object.__setattr__(self, "start", dist)
        elif isinstance(self.start, int) and not 0 <= self.start < n:
            raise ValueError(f"start state {self.start} outside alphabet")
        if self.states is not None:
            if len(self.states) != n:
                raise ValueError("state names do not match matrix size")
            object.__setattr__(self, "states", tuple(self.states))

    @property
    def n(self) -> int:
        return len(self.transition)

    @property
    def exact(self) -> bool:
        return isinstance(self.transition[0][0], Fraction)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.states) if self.states else Alphabet.of_size(self.n)

    @classmethod
    def uniform(cls, n: int, **kw) -> "ChainModel":
        p = Fraction(1, n)
        return cls(tuple(tuple(p for _ in range(n)) for _ in range(n)), **kw)

    def start_probability(self, state: int):
        one = Fraction(1) if self.exact else 1.0
        if self.start is None:
            return one
        if isinstance(self.start, int):
            return one if state == self.start else 0 * one
        return self.start[state]


def exact_probability(seq: Sequence[int], model: ChainModel):
    """Probability of the trajectory: start probability times transitions."""
    P = model.transition
    prob = model.start_probability(seq[0])
    for a, b in zip(seq, seq[1:]):
        prob *= P[a][b]
    return prob


def load_chain_spec(path: str | Path) -> ChainModel:
    """Read a chain spec file (YAML or JSON).

    Keys: ``states`` (list of names, order defines symbol order), ``rows``
    (one list of probabilities per state; decimals or ``"p/q"`` strings),
    optional ``start`` (state name), ``normalize`` (bool) and ``tolerance``
    (allowed row-sum error).
    """
    import yaml

    text = Path(path).read_text()
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ValueError(f"{path}: chain spec needs a 'rows' key")
    rows = [[_spec_entry(p) for p in row] for row in doc["rows"]]
    states = doc.get("states")
    states = tuple(str(s) for s in states) if states else None
    start = doc.get("start")
    if start is not None:
        names = states or tuple(str(i) for i in range(len(rows)))
        start = names.index(str(start))
    return ChainModel(tuple(map(tuple, rows)), start=start, states=states,
                      normalize=bool(doc.get("normalize", False)),
                      tolerance=None if doc.get("tolerance") is None else float(doc["tolerance"]))


def _spec_entry(p):
    # YAML parses 0.25 as a float; go through its repr to keep the decimal exact
    if isinstance(p, float):
        return Fraction(repr(p))
    return p if isinstance(p, int) else str(p)


def sample(model: ChainModel, N: int, seed=None, start: int | None = None) -> list[int]:
    """Draw a length-``N`` trajectory with a seeded numpy generator."""
    if N < 1:
        raise ValueError("trajectory length must be positive")
    rng = np.random.default_rng(seed)
    n = model.n
    if start is None:
        if isinstance(model.start, int):
            start = model.start
        elif model.start is not None:
            start = int(rng.choice(n, p=[float(p) for p in model.start]))
        else:
            start = int(rng.integers(n))
    cumulative = []
    for row in model.transition:
        acc = np.cumsum([float(p) for p in row])
        cumulative.append(list(acc[:-1]))
    u = rng.random(N - 1).tolist()
    out = [start]
    c = start
    append = out.append
    for x in u:
        c = bisect.bisect_right(cumulative[c], x)
        append(c)
    return out


def _check_irreducible(model: ChainModel) -> None:
    n = model.n
    adj = [[j for j in range(n) if model.transition[i][j] > 0] for i in range(n)]
    radj = [[i for i in range(n) if model.transition[i][j] > 0] for j in range(n)]
    for graph in (adj, radj):
        seen = {0}
        stack = [0]
        while stack:
            for j in graph[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != n:
            raise NotIrreducible("transition graph is not strongly connected")


def stationary(model: ChainModel):
    """Stationary distribution; exact ``Fraction`` values for exact models."""
    _check_irreducible(model)
    n = model.n
    P = model.transition
    if model.exact:
        # solve u (P - I) = 0 with sum(u) = 1 by Gauss-Jordan over rationals
        A = [[P[j][i] - (1 if i == j else 0) for j in range(n)] + [Fraction(0)] for i in range(n)]
        A[-1] = [Fraction(1)] * n + [Fraction(1)]
        for col in range(n):
            pivot = next(r for r in range(col, n) if A[r][col] != 0)
            A[col], A[pivot] = A[pivot], A[col]
            inv = 1 / A[col][col]
            A[col] = [v * inv for v in A[col]]
            for r in range(n):
                if r != col and A[r][col] != 0:
                    f = A[r][col]
                    A[r] = [a - f * b for a, b in zip(A[r], A[col])]
        return tuple(A[i][n] for i in range(n))
    Pm = np.asarray(P, dtype=float)
    A = Pm.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    u = np.linalg.solve(A, b)
    residual = np.abs(u @ Pm - u).max()
    if residual > 1e-12:
        raise ArithmeticError(f"stationary solve residual {residual:.3g} exceeds 1e-12")
    return tuple(float(x) for x in u)


def row_entropy(row) -> float:
    return -sum(float(p) * math.log2(float(p)) for p in row if p > 0)


def entropy_rate(model: ChainModel) -> float:
    """Entropy rate in bits per symbol: ``sum_i u_i H(row_i)``."""
    u = stationary(model)
    return sum(float(ui) * row_entropy(row) for ui, row in zip(u, model.transition))
