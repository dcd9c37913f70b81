"""Unbiased random bits from trajectories of Markov chains with unknown
transition probabilities."""
from .algo_a import algorithm_a, algorithm_a_segmented, algorithm_a_split_stream
from .algo_b import StreamState, algorithm_b
from .algo_c import algorithm_c, class_size, rank, rank_fast
from .core import Alphabet, alpha, assign_bits, multinomial, multiset_rank, multiset_unrank
from .estimators import MarkovBitExtractor
from .extractors import Extractor, elias, peres, von_neumann
from .markov import (ChainModel, ExitSequences, decompose, entropy_rate, exact_probability,
                     is_feasible, load_chain_spec, reconstruct, sample, stationary,
                     tail_fixed_permute)

__all__ = [
    "Alphabet", "ChainModel", "ExitSequences", "Extractor", "MarkovBitExtractor", "StreamState",
    "algorithm_a", "algorithm_a_segmented", "algorithm_a_split_stream", "algorithm_b",
    "algorithm_c", "alpha", "assign_bits", "class_size", "decompose", "elias", "entropy_rate",
    "exact_probability", "is_feasible", "load_chain_spec", "multinomial", "multiset_rank",
    "multiset_unrank", "peres", "rank", "rank_fast", "reconstruct", "sample", "stationary",
    "tail_fixed_permute", "von_neumann",
]
