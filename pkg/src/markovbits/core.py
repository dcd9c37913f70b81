"""Shared combinatorial primitives.

Symbols are 0-based integer indices into an alphabet; index order is the
symbol order used by every lexicographic ranking in the package.  Bit
strings are plain ``str`` objects over ``"01"``; the empty string is the
empty output.  Every count and rank is an exact Python ``int``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2

# Below this length the plain forward scan beats building a product tree.
TREE_THRESHOLD = 512


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of state names; position in ``names`` is the symbol index."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(self.names)) != len(self.names):
            raise ValueError("alphabet symbols must be distinct")

    @classmethod
    def of_size(cls, n: int) -> "Alphabet":
        if n < 1:
            raise ValueError(f"alphabet size must be positive, got {n}")
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._lookup[name]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    @property
    def _lookup(self) -> dict[str, int]:
        cache = self.__dict__.get("_cache")
        if cache is None:
            cache = {s: i for i, s in enumerate(self.names)}
            object.__setattr__(self, "_cache", cache)
        return cache

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.index(t) for t in tokens]

    def decode(self, symbols: Iterable[int]) -> list[str]:
        return [self.names[s] for s in symbols]


def alpha(n: int) -> int:
    """Total bits extractable from an equiprobable class of ``n`` members.

    For ``n = sum(2**e)`` (binary expansion) this is ``sum(e * 2**e)``.
    """
    if n < 0:
        raise ValueError("alpha is defined for non-negative integers")
    total = 0
    e = 0
    while n:
        if n & 1:
            total += e << e
        n >>= 1
        e += 1
    return total


def assign_bits(rank: int, class_size: int) -> str:
    """Map a 0-based rank inside a class to its output bit string.

    The class is cut into blocks of sizes ``2**n1 > 2**n2 > ...`` following
    the binary expansion of ``class_size``; a rank in a block of size
    ``2**e`` yields the ``e`` low-order bits of the rank.
    """
    if not 0 <= rank < class_size:
        raise ValueError(f"rank {rank} outside class of size {class_size}")
    offset = 0
    for e in range(class_size.bit_length() - 1, -1, -1):
        if not (class_size >> e) & 1:
            continue
        offset += 1 << e
        if rank < offset:
            if e == 0:
                return ""
            # offset is a multiple of 2**(e+1), so the low bits equal rank - block start
            return format(rank & ((1 << e) - 1), f"0{e}b")
    raise AssertionError("unreachable")  # pragma: no cover


def factorial(n: int) -> int:
    if n > 2000:
        return int(gmpy2.fac(n))
    return math.factorial(n)


def multinomial(counts: Iterable[int]) -> int:
    """Exact multinomial coefficient ``(sum k)! / prod(k!)``."""
    counts = [int(k) for k in counts]
    if any(k < 0 for k in counts):
        raise ValueError("counts must be non-negative")
    total = sum(counts)
    if total > 2000:
        num = gmpy2.fac(total)
        den = gmpy2.mpz(1)
        for k in counts:
            den *= gmpy2.fac(k)
        return int(num // den)
    result = 1
    running = 0
    for k in counts:
        running += k
        result *= math.comb(running, k)
    return result


def symbol_counts(seq: Sequence[int], n: int | None = None) -> list[int]:
    if n is None:
        n = max(seq) + 1 if len(seq) else 0
    counts = [0] * n
    for s in seq:
        counts[s] += 1
    return counts


def multiset_rank(seq: Sequence[int]) -> int:
    """0-based lexicographic position of ``seq`` among the distinct
    permutations of its own multiset of symbols."""
    if len(seq) > TREE_THRESHOLD:
        return tree_rank([seq])
    counts = symbol_counts(seq)
    remaining = len(seq)
    perms = multinomial(counts)
    rank = 0
    for x in seq:
        smaller = sum(counts[:x])
        if smaller:
            rank += perms * smaller // remaining
        perms = perms * counts[x] // remaining
        counts[x] -= 1
        remaining -= 1
    return rank


def multiset_unrank(counts: Sequence[int], rank: int) -> list[int]:
    counts = list(counts)
    remaining = sum(counts)
    perms = multinomial(counts)
    if not 0 <= rank < perms:
        raise ValueError(f"rank {rank} outside [0, {perms})")
    out = []
    while remaining:
        for w, k in enumerate(counts):
            if not k:
                continue
            block = perms * k // remaining
            if rank < block:
                out.append(w)
                counts[w] -= 1
                remaining -= 1
                perms = block
                break
            rank -= block
    return out


def _tree_leaves(lanes: Sequence[Sequence[int]]) -> list[tuple[int, int, int]]:
    # one (smaller, suffix_len, same) triple per position, last position first
    leaves = []
    for lane in reversed(lanes):
        if not len(lane):
            continue
        counts = [0] * (max(lane) + 1)
        for pos in range(len(lane) - 1, -1, -1):
            x = lane[pos]
            counts[x] += 1
            leaves.append((sum(counts[:x]), len(lane) - pos, counts[x]))
    return leaves


def tree_rank(lanes: Sequence[Sequence[int]]) -> int:
    """Mixed-radix rank of the lane tuple, computed with a product tree.

    Equals ``sum_i multiset_rank(lane_i) * prod_{j>i} multinomial(lane_j)``:
    the lexicographic rank of the concatenated lanes when each lane ranges
    over the permutations of its own multiset.  Each position contributes a
    rational term; pairwise combination keeps a shared denominator so that
    only one exact division happens at the root.
    """
    leaves = _tree_leaves(lanes)
    if not leaves:
        return 0
    mpz = gmpy2.mpz
    level = [(mpz(a), mpz(b), mpz(c)) for a, b, c in leaves]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            a1, b1, c1 = level[i]
            a2, b2, c2 = level[i + 1]
            nxt.append((a1 * c2 + b1 * a2, b1 * b2, c1 * c2))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    a, _, c = level[0]
    q, r = divmod(a, c)
    if r:
        raise ArithmeticError("product tree left a non-zero remainder")
    return int(q)
