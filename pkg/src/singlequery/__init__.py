"""Exact simulation of single-query quantum database algorithms.

Coin weighing, Walsh binary search, Huffman-coded search and random coding
over ``Z_A``, each paired with a classical baseline, plus the coding tools
and running-time model used to compare them.
"""

__version__ = "0.1.0"

from .algebra import (
    DigitString,
    GeneratorSet,
    dot_mod,
    expand_member,
    hamming_and_weight,
    is_linearly_independent,
    random_generators,
    walsh_generators,
)
from .algorithms import (
    Transcript,
    n_prime,
    run_bv_coin_weighing,
    run_huffman_search,
    run_random_coding,
    run_walsh_search,
)
from .baselines import (
    classical_bisection,
    classical_huffman_search,
    classical_parity_readout,
    classical_random_code,
)
from .codes import (
    HuffmanCode,
    SourceDistribution,
    build_huffman,
    collision_probability,
    collision_probability_approx,
    encode,
    find_collision_free_generators,
    huffman_queries,
    truncation_error_probability,
)
from .costmodel import CostReport, coin_bound, info_bound, predetermined_limit, runtime
from .oracle import Database, OracleSpec, QueryCounter, apply_quantum_query, classical_answer
from .quantum import (
    QuantumState,
    RegisterLayout,
    fourier_all,
    hadamard_all,
    inner_product,
    measure_register,
    phase_eigenstate,
    von_neumann_entropy,
)
