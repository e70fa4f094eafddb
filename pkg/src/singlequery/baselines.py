"""Classical strategies with exact query counts, one per quantum algorithm."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import DigitString, GeneratorSet, walsh_generators
from .algorithms import Transcript, _require_weight_one
from .codes import HuffmanCode, encode_rows, huffman_queries
from .oracle import Database, OracleSpec, as_database


def classical_bisection(oracle: OracleSpec | Database, n: int) -> Transcript:
    """Ask each Walsh generator once; the answers spell the marked index in binary."""
    db = as_database(oracle)
    _require_weight_one(db)
    before = db.calls
    z = [db.ask(g) for g in walsh_generators(n)]
    index = sum(bit << k for k, bit in enumerate(z))
    return Transcript(
        algorithm="classical_bisection",
        recovered=index,
        oracle_calls=db.calls - before,
        success=db.reveal() == DigitString.unit(n, index),
    )


def classical_parity_readout(oracle: OracleSpec | Database) -> Transcript:
    """Read ``y`` one bit at a time with singleton queries."""
    db = as_database(oracle)
    before = db.calls
    bits = [db.ask(DigitString.unit(db.n, i)) for i in range(db.n)]
    recovered = DigitString(tuple(bits), 2)
    return Transcript(
        algorithm="classical_parity_readout",
        recovered=recovered,
        oracle_calls=db.calls - before,
        success=recovered == db.reveal(),
    )


def classical_huffman_search(oracle: OracleSpec | Database, code: HuffmanCode) -> Transcript:
    """Adaptive Huffman descent: ask query ``k`` until a whole codeword has been read."""
    db = as_database(oracle)
    _require_weight_one(db)
    queries = huffman_queries(code, code.max_length)
    complete = {c.digits: i for i, c in enumerate(code.codewords)}
    before = db.calls
    bits: list[int] = []
    found = None
    for q in queries:
        bits.append(db.ask(q))
        found = complete.get(tuple(bits))
        if found is not None:
            break
    return Transcript(
        algorithm="classical_huffman_search",
        recovered=found,
        oracle_calls=db.calls - before,
        success=found is not None and db.reveal() == DigitString.unit(code.n, found),
    )


def classical_random_code(
    oracle: OracleSpec | Database, gens: GeneratorSet, candidates: Sequence[DigitString]
) -> Transcript:
    """Ask every generator once and look the codeword up among the candidates."""
    db = as_database(oracle)
    before = db.calls
    z = np.array([db.ask(g) for g in gens], dtype=np.int64)
    ys = np.array([c.digits for c in candidates], dtype=np.int64)
    codes = encode_rows(gens.matrix(), ys, gens.modulus)
    hits = [candidates[j] for j in np.nonzero((codes == z).all(axis=1))[0]]
    recovered = hits[0] if len(hits) == 1 else None
    return Transcript(
        algorithm="classical_random_code",
        recovered=recovered,
        oracle_calls=db.calls - before,
        success=recovered is not None and recovered == db.reveal(),
        ambiguous=len(hits) > 1,
    )
