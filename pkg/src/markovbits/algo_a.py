"""Batch extraction from a finite trajectory by per-state exit lanes."""
from __future__ import annotations

from typing import Callable, Sequence

from .extractors import get_extractor
from .markov import decompose


def _trimmed_lanes(seq: Sequence[int], trim_final_lane: bool) -> list[tuple[int, ...]]:
    E = decompose(seq)
    final = seq[-1]
    lanes = []
    for i, lane in enumerate(E.lanes):
        if i != final or trim_final_lane:
            lane = lane[:-1]
        lanes.append(lane)
    return lanes


def algorithm_a(seq: Sequence[int], psi="elias", trim_final_lane: bool = False) -> str:
    """Apply ``psi`` to every exit lane and concatenate in state order.

    Every lane loses its last symbol except the lane of the final state,
    which is used whole unless ``trim_final_lane`` is set.
    """
    if not len(seq):
        return ""
    psi = get_extractor(psi)
    return "".join(psi(lane) for lane in _trimmed_lanes(seq, trim_final_lane))


def whole(length: int) -> list[int]:
    return [length] if length else []


def halves(length: int) -> list[int]:
    """Split into ``floor(L/2)`` then ``ceil(L/2)``."""
    return [p for p in (length // 2, length - length // 2) if p]


SEGMENT_RULES: dict[str, Callable[[int], list[int]]] = {"whole": whole, "halves": halves}


def algorithm_a_segmented(
    seq: Sequence[int], psi="elias", segment_rule="halves", trim_final_lane: bool = False
) -> str:
    """Like :func:`algorithm_a`, but each lane is cut into consecutive
    segments whose lengths depend only on the lane length, and ``psi`` runs
    on each segment separately."""
    if not len(seq):
        return ""
    psi = get_extractor(psi)
    rule = SEGMENT_RULES[segment_rule] if isinstance(segment_rule, str) else segment_rule
    out = []
    for lane in _trimmed_lanes(seq, trim_final_lane):
        parts = rule(len(lane))
        if sum(parts) != len(lane) or any(p < 0 for p in parts):
            raise ValueError(f"segment lengths {parts} do not partition a lane of length {len(lane)}")
        pos = 0
        for p in parts:
            out.append(psi(lane[pos:pos + p]))
            pos += p
    return "".join(out)


def split_points(seq: Sequence[int], k: int, rule: str = "position") -> list[tuple[int, int]]:
    """Piece boundaries ``(lo, hi)`` (inclusive) for splitting at the start state.

    ``rule="position"``: a piece ends at the first position ``i > k``
    (1-based, relative to the piece) holding the piece's start state.
    ``rule="returns"``: a piece ends at the ``k``-th return to its start
    state.  The next piece starts at the cut position.  A cut at the final
    symbol is not made.

    Only ``"returns"`` keeps the output unbiased: the number of returns is
    fixed by the transition counts, while "no return between position k and
    the cut" is not preserved by the lane rearrangements the analysis relies
    on.  With ``k=2`` on a two-state chain every completed ``"position"``
    piece looks like ``0 ? 1 ... 1 0`` and can only ever yield ``"0"``.
    """
    if k < 1:
        raise ValueError("split threshold must be at least 1")
    if rule not in ("position", "returns"):
        raise ValueError(f"unknown split rule {rule!r}")
    pieces = []
    lo = 0
    N = len(seq)
    while True:
        anchor = seq[lo]
        if rule == "position":
            cut = next((i for i in range(lo + k, N - 1) if seq[i] == anchor), None)
        else:
            cut, seen = None, 0
            for i in range(lo + 1, N - 1):
                if seq[i] == anchor:
                    seen += 1
                    if seen == k:
                        cut = i
                        break
        if cut is None:
            pieces.append((lo, N - 1))
            return pieces
        pieces.append((lo, cut))
        lo = cut


def algorithm_a_split_stream(seq: Sequence[int], psi="elias", k: int = 16,
                             trim_final_lane: bool = False, rule: str = "position") -> str:
    """Cut the trajectory at returns to its start state (see
    :func:`split_points`) and run :func:`algorithm_a` on each piece."""
    if not len(seq):
        return ""
    psi = get_extractor(psi)
    return "".join(
        algorithm_a(seq[lo:hi + 1], psi, trim_final_lane) for lo, hi in split_points(seq, k, rule)
    )
