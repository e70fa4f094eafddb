"""Single-query recovery algorithms: prepare, query once, transform, measure, decode.

Walsh search, Huffman search and random coding share one pipeline over an
index register ``s`` holding selector strings; the query string ``c(s)``
paired with each ``s`` is a classical function of it, so it is generated
on the fly as the query table of the oracle call instead of being stored
as a second register.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    DigitString,
    GeneratorSet,
    is_linearly_independent,
    member_table,
    random_generators,
    walsh_generators,
)
from .codes import (
    HuffmanCode,
    SourceDistribution,
    build_huffman,
    code_length,
    encode_rows,
    huffman_queries,
)
from .errors import DomainError, PreconditionError, ResourceError
from .oracle import Database, OracleSpec, as_database, n_prime
from .quantum import (
    QuantumState,
    RegisterLayout,
    fourier_all,
    hadamard_all,
    measure_register,
    phase_eigenstate,
    register_fidelity,
    root_of_unity,
    uniform_state,
)

__all__ = [
    "Transcript",
    "n_prime",
    "CoinWeighing",
    "IndexedSearch",
    "walsh_search",
    "huffman_search",
    "random_coding",
    "run_bv_coin_weighing",
    "run_walsh_search",
    "run_huffman_search",
    "run_random_coding",
]

MAX_COIN_QUBITS = 20
MAX_INDEX_DIM = 2**20


@dataclass
class Transcript:
    algorithm: str
    recovered: DigitString | int | None
    oracle_calls: int
    success: bool
    final_outcome_probability: float = 1.0
    outcome: int | None = None
    ambiguous: bool = False
    answer_register_fidelity: float | None = None

    def to_dict(self) -> dict:
        rec = self.recovered
        return {
            "algorithm": self.algorithm,
            "recovered": str(rec) if isinstance(rec, DigitString) else rec,
            "oracle_calls": self.oracle_calls,
            "success": self.success,
            "final_outcome_probability": self.final_outcome_probability,
            "outcome": self.outcome,
            "ambiguous": self.ambiguous,
            "answer_register_fidelity": self.answer_register_fidelity,
        }


def _require_weight_one(db: Database) -> None:
    # input validation only; the algorithm itself never reads the contents
    if db.reveal().weight != 1:
        raise PreconditionError("database must hold a string of Hamming weight 1")


class CoinWeighing:
    """Bernstein-Vazirani recovery of an arbitrary ``n``-bit string.

    The answer register has the database's alphabet (``n' + 1`` for a
    spring scale, 2 for a parity oracle) and starts in the ``(-1)**b``
    eigenstate, so the query only flips phases on ``X``.
    """

    def __init__(self, n: int, answer_alphabet: int):
        if n > MAX_COIN_QUBITS:
            raise ResourceError(f"n = {n} exceeds the {MAX_COIN_QUBITS}-qubit simulator cap")
        if answer_alphabet % 2:
            raise DomainError("the (-1)**b answer state needs an even alphabet")
        self.n = n
        self.answer_state = phase_eigenstate(answer_alphabet, -1, name="B")
        zero = QuantumState.basis(RegisterLayout((("X", 2**n),)))
        self.prepared = hadamard_all(zero, "X") @ self.answer_state

    def post_query_state(self, db: Database) -> QuantumState:
        return db.query(self.prepared, query_register="X", answer_register="B")

    def run(self, db: Database) -> Transcript:
        before = db.calls
        psi_y = self.post_query_state(db)
        fidelity = register_fidelity(psi_y, "B", self.answer_state)
        final = hadamard_all(psi_y, "X")
        outcome, prob = measure_register(final, "X")
        recovered = DigitString.from_index(outcome, self.n)
        return Transcript(
            algorithm="coin_weighing",
            recovered=recovered,
            oracle_calls=db.calls - before,
            success=recovered == db.reveal(),
            final_outcome_probability=prob,
            outcome=outcome,
            answer_register_fidelity=fidelity,
        )


def run_bv_coin_weighing(oracle: OracleSpec | Database) -> Transcript:
    db = as_database(oracle)
    if db.query_modulus != 2:
        raise DomainError("coin weighing needs a binary database")
    return CoinWeighing(db.n, db.answer_alphabet).run(db)


class IndexedSearch:
    """Single query over the group generated by the rows of ``queries``.

    ``candidates`` are the database contents the decoder knows about; a
    measured codeword shared by two candidates is reported as ambiguous.
    """

    def __init__(
        self,
        name: str,
        gens: GeneratorSet,
        candidates: Sequence[DigitString],
        labels: Sequence | None = None,
    ):
        self.name = name
        self.gens = gens
        self.modulus = a = gens.modulus
        dim = a**gens.m
        if dim > MAX_INDEX_DIM:
            raise ResourceError(f"index register of dimension {dim} exceeds {MAX_INDEX_DIM}")
        self.candidates = list(candidates)
        self.labels = list(labels) if labels is not None else self.candidates
        self.queries = member_table(gens)
        self.answer_state = phase_eigenstate(a, root_of_unity(a), name="B")
        self.prepared = uniform_state(dim, "s") @ self.answer_state
        ys = np.array([c.digits for c in self.candidates], dtype=np.int64)
        codes = encode_rows(gens.matrix(), ys, a)
        weights = a ** np.arange(gens.m, dtype=np.int64)
        self.codeword_index = codes @ weights
        self.decoder: dict[int, list[int]] = {}
        for j, z in enumerate(self.codeword_index.tolist()):
            self.decoder.setdefault(z, []).append(j)

    def post_query_state(self, db: Database) -> QuantumState:
        return db.query(self.prepared, query_register="s", answer_register="B", queries=self.queries)

    def decode(self, outcome: int):
        """Label of the unique candidate with codeword ``outcome``, else None."""
        hits = self.decoder.get(outcome, [])
        return (self.labels[hits[0]], False) if len(hits) == 1 else (None, len(hits) > 1)

    def truth_label(self, db: Database):
        truth = db.reveal()
        for c, label in zip(self.candidates, self.labels):
            if c == truth:
                return label
        return None

    def run(self, db: Database) -> Transcript:
        if db.answer_alphabet != self.modulus or db.n != self.gens.n:
            raise DomainError("database does not match this search's code")
        before = db.calls
        psi_y = self.post_query_state(db)
        fidelity = register_fidelity(psi_y, "B", self.answer_state)
        if self.modulus == 2:
            final = hadamard_all(psi_y, "s")
        else:
            final = fourier_all(psi_y, "s", self.modulus)
        outcome, prob = measure_register(final, "s")
        recovered, ambiguous = self.decode(outcome)
        truth = self.truth_label(db)
        return Transcript(
            algorithm=self.name,
            recovered=recovered,
            oracle_calls=db.calls - before,
            success=recovered is not None and recovered == truth,
            final_outcome_probability=prob,
            outcome=outcome,
            ambiguous=ambiguous,
            answer_register_fidelity=fidelity,
        )


def _unit_candidates(n: int) -> list[DigitString]:
    return [DigitString.unit(n, i) for i in range(n)]


def walsh_search(n: int) -> IndexedSearch:
    """Prepared search for the marked item among ``n = 2**p`` positions."""
    return IndexedSearch("walsh_search", walsh_generators(n), _unit_candidates(n), range(n))


def huffman_search(source: SourceDistribution, m: int, code: HuffmanCode | None = None) -> IndexedSearch:
    """Prepared search using the first ``m`` Huffman queries of ``source``."""
    code = code or build_huffman(source)
    rows = huffman_queries(code, m)
    if not is_linearly_independent(rows, 2):
        raise PreconditionError(
            f"the first {m} Huffman queries are linearly dependent "
            f"(longest codeword has {code.max_length} bits)"
        )
    gens = GeneratorSet(tuple(rows), check=False)
    return IndexedSearch("huffman_search", gens, _unit_candidates(code.n), range(code.n))


def random_coding(
    candidates: Sequence[DigitString], l: int, seed, modulus: int | None = None
) -> IndexedSearch:
    """Prepared search with ``ceil(log_A k) + l`` random independent generators."""
    candidates = list(candidates)
    if not candidates:
        raise DomainError("no candidates")
    a = modulus or candidates[0].modulus
    n = candidates[0].n
    m = code_length(a, len(candidates), l)
    if m > n:
        raise DomainError(f"code length {m} exceeds string length {n}")
    if float(a) ** m > MAX_INDEX_DIM:
        raise ResourceError(f"A**m = {a}**{m} exceeds {MAX_INDEX_DIM}")
    gens = random_generators(n, m, a, seed)
    return IndexedSearch("random_coding", gens, candidates)


def run_walsh_search(n: int, oracle: OracleSpec | Database) -> Transcript:
    db = as_database(oracle)
    if db.n != n:
        raise DomainError(f"database has {db.n} items, expected {n}")
    _require_weight_one(db)
    return walsh_search(n).run(db)


def run_huffman_search(source: SourceDistribution, m: int, oracle: OracleSpec | Database) -> Transcript:
    db = as_database(oracle)
    if db.n != source.n:
        raise DomainError("database size differs from the source's")
    _require_weight_one(db)
    return huffman_search(source, m).run(db)


def run_random_coding(
    candidates: Sequence[DigitString], l: int, seed, oracle: OracleSpec | Database
) -> Transcript:
    db = as_database(oracle)
    if db.answer_kind == "spring_scale":
        raise DomainError("random coding needs a Z_A dot-product or parity database")
    return random_coding(candidates, l, seed, db.query_modulus).run(db)
