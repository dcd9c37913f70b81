"""scikit-learn style front end.

``X`` is a collection of trajectories (each a sequence of 0-based state
indices); ``transform`` returns one bit string per trajectory.  Nothing is
learned from the data: ``fit`` only fixes the alphabet size, which keeps the
transformer usable inside pipelines and with ``get_params``/``set_params``.
"""
from __future__ import annotations

from numbers import Integral

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import ALGORITHMS, get_algorithm
from .extractors import DEFAULT_PERES_DEPTH


def check_trajectories(X, n_states=None) -> list[list[int]]:
    """Validate ``X`` as a list of integer trajectories.

    A single flat sequence of integers is treated as one trajectory.
    """
    if isinstance(X, np.ndarray) and X.ndim == 1 and X.dtype != object:
        X = [X]
    elif len(X) and all(isinstance(v, Integral) for v in X):
        X = [X]
    out = []
    for i, seq in enumerate(X):
        arr = np.asarray(seq)
        if arr.ndim != 1:
            raise ValueError(f"trajectory {i} is not one-dimensional")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"trajectory {i} contains non-integer symbols")
        seq = arr.astype(np.int64).tolist()
        if seq and min(seq) < 0:
            raise ValueError(f"trajectory {i} contains a negative symbol")
        if n_states is not None and seq and max(seq) >= n_states:
            raise ValueError(f"trajectory {i} has symbol {max(seq)} >= n_states={n_states}")
        out.append(seq)
    return out


class MarkovBitExtractor(TransformerMixin, BaseEstimator):
    """Turn Markov-chain trajectories into unbiased bits.

    Parameters
    ----------
    algorithm : {"a", "a-seg", "a-split", "b", "c", "vn", "elias", "peres"}
        Extraction scheme.  ``"c"`` is information-optimal for the given
        length; ``"b"`` is the streaming scheme; the last three apply a coin
        extractor to the raw trajectory (only valid for i.i.d. input).
    psi : {"elias", "vn", "peres"}
        Coin extractor used inside ``"a"``, ``"a-seg"``, ``"a-split"`` and ``"b"``.
    window : int
        Window size for ``"b"``.
    split_threshold : int
        Threshold ``k`` for ``"a-split"``.
    split_rule : {"position", "returns"}
        Cut rule for ``"a-split"``; see :func:`markovbits.algo_a.split_points`.
    peres_depth : int
    n_states : int or None
        Alphabet size; inferred from the training data when ``None``.
    """

    def __init__(self, algorithm="c", psi="elias", window=4, split_threshold=16,
                 split_rule="position", peres_depth=DEFAULT_PERES_DEPTH, n_states=None):
        self.algorithm = algorithm
        self.psi = psi
        self.window = window
        self.split_threshold = split_threshold
        self.split_rule = split_rule
        self.peres_depth = peres_depth
        self.n_states = n_states

    def fit(self, X, y=None):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        seqs = check_trajectories(X, self.n_states)
        if self.n_states is not None:
            self.n_states_ = int(self.n_states)
        else:
            self.n_states_ = max((max(s) for s in seqs if s), default=-1) + 1
        self.extract_ = get_algorithm(self.algorithm, psi=self.psi, window=self.window,
                                      k=self.split_threshold, depth=self.peres_depth,
                                      split_rule=self.split_rule)
        return self

    def transform(self, X) -> list[str]:
        check_is_fitted(self, "extract_")
        return [self.extract_(seq) if seq else "" for seq in check_trajectories(X, self.n_states_)]

    def efficiency(self, X) -> float:
        """Output bits per input symbol over ``X``."""
        seqs = check_trajectories(X)
        bits = sum(len(b) for b in self.transform(seqs))
        return bits / max(1, sum(len(s) for s in seqs))
