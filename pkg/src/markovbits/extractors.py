"""Unbiased-bit extractors for i.i.d. sources (biased n-face coins)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .core import assign_bits, multinomial, multiset_rank, symbol_counts

DEFAULT_PERES_DEPTH = 32


class AlphabetTooLarge(ValueError):
    pass


def von_neumann(seq: Sequence[int]) -> str:
    """Pairwise scheme: ``ab -> 0`` if a < b, ``1`` if a > b, nothing if equal."""
    out = []
    for i in range(0, len(seq) - 1, 2):
        a, b = seq[i], seq[i + 1]
        if a < b:
            out.append("0")
        elif a > b:
            out.append("1")
    return "".join(out)


def elias(seq: Sequence[int]) -> str:
    """Optimal extractor: rank ``seq`` inside its permutation class and
    encode the rank with :func:`~markovbits.core.assign_bits`."""
    if len(seq) < 2:
        return ""
    if len(seq) <= 16:
        return _elias_short(tuple(seq))
    return assign_bits(multiset_rank(seq), multinomial(symbol_counts(seq)))


@lru_cache(maxsize=1 << 16)
def _elias_short(seq: tuple[int, ...]) -> str:
    return assign_bits(multiset_rank(seq), multinomial(symbol_counts(seq)))


def peres(seq: Sequence[int], depth: int = DEFAULT_PERES_DEPTH) -> str:
    """Iterated von Neumann extractor over a binary alphabet.

    ``depth=1`` is plain von Neumann.  Deeper levels recurse on the pairwise
    XOR stream and on the values of the equal pairs (first member kept).
    """
    if depth < 1:
        raise ValueError("Peres depth must be at least 1")
    if any(s > 1 or s < 0 for s in seq):
        raise AlphabetTooLarge("Peres extractor needs a two-symbol alphabet")
    out: list[str] = []
    _peres(list(seq), depth, out)
    return "".join(out)


def _peres(bits: list[int], depth: int, out: list[str]) -> None:
    if len(bits) < 2:
        return
    xors = []
    equal = []
    head = []
    for i in range(0, len(bits) - 1, 2):
        a, b = bits[i], bits[i + 1]
        if a == b:
            xors.append(0)
            equal.append(a)
        else:
            xors.append(1)
            head.append("0" if a < b else "1")
    out.append("".join(head))
    if depth > 1:
        _peres(xors, depth - 1, out)
        _peres(equal, depth - 1, out)


@dataclass(frozen=True)
class Extractor:
    """A named coin extractor, callable on a symbol sequence."""

    kind: str = "elias"
    depth: int = DEFAULT_PERES_DEPTH

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown extractor {self.kind!r}; choose from {sorted(_KINDS)}")
        if self.depth < 1:
            raise ValueError("Peres depth must be at least 1")

    def __call__(self, seq: Sequence[int]) -> str:
        if self.kind == "peres":
            return peres(seq, self.depth)
        return _KINDS[self.kind](seq)


_KINDS: dict[str, Callable[[Sequence[int]], str]] = {
    "vn": von_neumann,
    "von_neumann": von_neumann,
    "elias": elias,
    "peres": peres,
}


def get_extractor(psi) -> Callable[[Sequence[int]], str]:
    """Resolve a name, an :class:`Extractor`, or any callable to a callable."""
    if isinstance(psi, str):
        return Extractor(psi)
    if callable(psi):
        return psi
    raise TypeError(f"cannot use {psi!r} as an extractor")
