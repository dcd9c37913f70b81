"""Streaming extraction with per-state windows (constant space).

Each state owns a buffer of the states that followed it.  A buffer is
flushed through the extractor only when it holds a full window *and* the
chain has just arrived at that buffer's state.  Window size 2 with the von
Neumann extractor is Blum's algorithm.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .extractors import get_extractor

Schedule = Union[int, Sequence[int], Callable[[int, int], int]]


class NotStarted(RuntimeError):
    pass


def _constant_sizes(window: Schedule, n: int) -> list[int] | None:
    if callable(window):
        return None
    if isinstance(window, int):
        if window < 1:
            raise ValueError("window size must be a positive integer")
        return [window] * n
    sizes = [int(w) for w in window]
    if len(sizes) != n or any(w < 1 for w in sizes):
        raise ValueError(f"need {n} positive per-state window sizes, got {sizes}")
    return sizes


@dataclass
class StreamSummary:
    windows: list[int]          # full windows emitted per state
    residual: list[tuple[int, ...]]  # buffered, never-emitted symbols per state
    symbols: int
    bits: int


class StreamState:
    """Incremental extractor state.

    >>> s = StreamState(2, window=2, psi="vn")
    >>> s.start(0)
    >>> [s.push(x) for x in (1, 0, 0)]
    ['', '', '1']
    """

    def __init__(self, n: int, window: Schedule = 4, psi="elias"):
        if n < 1:
            raise ValueError("alphabet size must be positive")
        self.n = n
        self.sizes = _constant_sizes(window, n)
        self.window = window if self.sizes is None else (lambda i, k: self.sizes[i])
        self.psi = get_extractor(psi)
        self.buffers: list[list[int]] = [[] for _ in range(n)]
        self.counters = [1] * n
        self.current: int | None = None
        self.symbols = 0
        self.bits = 0
        self.max_buffer = 0

    def start(self, symbol: int) -> None:
        self._check(symbol)
        self.current = symbol
        self.symbols = 1

    def push(self, symbol: int) -> str:
        """Consume one symbol; return the bits emitted (often empty)."""
        if self.current is None:
            raise NotStarted("call start() with the first symbol before push()")
        self._check(symbol)
        buf = self.buffers[self.current]
        buf.append(symbol)
        if len(buf) > self.max_buffer:
            self.max_buffer = len(buf)
        self.symbols += 1
        self.current = symbol
        target = self.buffers[symbol]
        if len(target) >= self.window(symbol, self.counters[symbol]):
            out = self.psi(target)
            self.buffers[symbol] = []
            self.counters[symbol] += 1
            self.bits += len(out)
            return out
        return ""

    def feed(self, symbols: Iterable[int]) -> Iterable[str]:
        """Yield non-empty emissions; the first symbol starts the stream if needed."""
        it = iter(symbols)
        if self.current is None:
            first = next(it, None)
            if first is None:
                return
            self.start(first)
        if self.sizes is None:
            for s in it:
                out = self.push(s)
                if out:
                    yield out
            return
        # inlined push() for constant windows
        sizes, buffers, counters, psi, n = self.sizes, self.buffers, self.counters, self.psi, self.n
        c = self.current
        try:
            for s in it:
                if not 0 <= s < n:
                    raise ValueError(f"symbol {s} outside alphabet of size {n}")
                buf = buffers[c]
                buf.append(s)
                if len(buf) > self.max_buffer:
                    self.max_buffer = len(buf)
                self.symbols += 1
                c = s
                if len(buffers[s]) >= sizes[s]:
                    out = psi(buffers[s])
                    buffers[s] = []
                    counters[s] += 1
                    if out:
                        self.bits += len(out)
                        self.current = c
                        yield out
        finally:
            self.current = c

    def finalize(self) -> StreamSummary:
        """Report counters; residual buffers are discarded, never emitted."""
        summary = StreamSummary(
            windows=[k - 1 for k in self.counters],
            residual=[tuple(b) for b in self.buffers],
            symbols=self.symbols,
            bits=self.bits,
        )
        self.buffers = [[] for _ in range(self.n)]
        return summary

    def _check(self, symbol: int) -> None:
        if not 0 <= symbol < self.n:
            raise ValueError(f"symbol {symbol} outside alphabet of size {self.n}")


def algorithm_b(seq: Sequence[int], psi="elias", window: Schedule = 4, n: int | None = None) -> str:
    """Batch form of the streaming extractor: concatenated emissions."""
    if not len(seq):
        return ""
    if n is None:
        n = max(seq) + 1
    state = StreamState(n, window, psi)
    return "".join(state.feed(seq))
