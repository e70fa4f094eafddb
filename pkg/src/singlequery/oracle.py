"""Databases answering classical and superposed queries.

``R_y`` maps ``|x, b>`` to ``|x, (b + a(x, y)) mod A'>``. Every call, classical
or quantum, is one query no matter how many amplitudes it touches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import DigitString, all_strings, dot_mod, hamming_and_weight
from .errors import DimensionError, DomainError, LayoutError
from .quantum import QuantumState

ANSWER_KINDS = ("parity", "spring_scale", "zA_dot")


def n_prime(n: int) -> int:
    """Smallest odd integer >= n: ``2 * ceil((n + 1) / 2) - 1``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return 2 * math.ceil((n + 1) / 2) - 1


@dataclass(frozen=True)
class OracleSpec:
    contents: DigitString
    answer_kind: str = "parity"

    def __post_init__(self):
        if self.answer_kind not in ANSWER_KINDS:
            raise DomainError(f"unknown answer kind {self.answer_kind!r}")
        if self.answer_kind in ("parity", "spring_scale") and self.contents.modulus != 2:
            raise DomainError(f"{self.answer_kind} databases hold bit strings")

    @property
    def n(self) -> int:
        return self.contents.n

    @property
    def query_modulus(self) -> int:
        return self.contents.modulus

    @property
    def answer_alphabet(self) -> int:
        if self.answer_kind == "parity":
            return 2
        if self.answer_kind == "spring_scale":
            return n_prime(self.n) + 1
        return self.contents.modulus


@dataclass
class QueryCounter:
    calls: int = 0

    def tick(self) -> None:
        self.calls += 1


def _check_query(spec: OracleSpec, x: DigitString) -> None:
    if x.n != spec.n:
        raise DimensionError(f"query has length {x.n}, database has {spec.n}")
    if x.modulus != spec.query_modulus:
        raise DimensionError(f"query modulus {x.modulus} != {spec.query_modulus}")


def classical_answer(spec: OracleSpec, x: DigitString, counter: QueryCounter) -> int:
    _check_query(spec, x)
    y = spec.contents
    if spec.answer_kind == "parity":
        answer = dot_mod(x, y, 2)
    elif spec.answer_kind == "spring_scale":
        answer = hamming_and_weight(x, y)
    else:
        answer = dot_mod(x, y, y.modulus)
    counter.tick()
    return answer


def answers_for(spec: OracleSpec, queries: np.ndarray) -> np.ndarray:
    """``a(x, y)`` for every row ``x`` of ``queries``; does not count as a query."""
    # float64 BLAS is exact here: every partial sum is far below 2**53
    raw = np.rint(np.asarray(queries, dtype=np.float64) @ spec.contents.array().astype(np.float64))
    raw = raw.astype(np.int64)
    if spec.answer_kind == "spring_scale":
        return raw
    return raw % spec.answer_alphabet


def apply_quantum_query(
    state: QuantumState,
    spec: OracleSpec,
    counter: QueryCounter,
    query_register: str = "X",
    answer_register: str = "B",
    queries: np.ndarray | None = None,
) -> QuantumState:
    """Apply ``R_y`` once.

    ``queries[j]`` is the query string held by basis value ``j`` of
    ``query_register``. By default the register enumerates every string of
    length ``n`` in little-endian index order.
    """
    layout = state.layout
    qdim = layout.dim(query_register)
    bdim = layout.dim(answer_register)
    if bdim != spec.answer_alphabet:
        raise LayoutError(
            f"answer register has dimension {bdim}, database answers in {spec.answer_alphabet}"
        )
    if queries is None:
        if qdim != spec.query_modulus**spec.n:
            raise LayoutError(
                f"query register dimension {qdim} != {spec.query_modulus}**{spec.n}"
            )
        queries = all_strings(spec.n, spec.query_modulus)
    elif queries.shape != (qdim, spec.n):
        raise LayoutError(f"query table shape {queries.shape} != {(qdim, spec.n)}")
    shift = answers_for(spec, queries) % bdim

    qa, ba = layout.axis(query_register), layout.axis(answer_register)
    arr = np.moveaxis(state.tensor(), (qa, ba), (0, 1))
    # new[x, b] = old[x, b - a(x)]
    src = (np.arange(bdim)[None, :] - shift[:, None]) % bdim
    src = src.reshape(src.shape + (1,) * (arr.ndim - 2))
    moved = np.take_along_axis(arr, np.broadcast_to(src, arr.shape), axis=1)
    counter.tick()
    return QuantumState(layout, np.moveaxis(moved, (0, 1), (qa, ba)), check=False, copy=False)


class Database:
    """Opaque handle around an :class:`OracleSpec` with its own call counter.

    Algorithms see the size and answer alphabet, never the contents.
    """

    def __init__(self, spec: OracleSpec):
        self._spec = spec
        self._counter = QueryCounter()

    @classmethod
    def of(cls, contents: DigitString | str, answer_kind: str = "parity", modulus: int = 2) -> "Database":
        if isinstance(contents, str):
            contents = DigitString.parse(contents, modulus)
        return cls(OracleSpec(contents, answer_kind))

    @property
    def n(self) -> int:
        return self._spec.n

    @property
    def answer_kind(self) -> str:
        return self._spec.answer_kind

    @property
    def answer_alphabet(self) -> int:
        return self._spec.answer_alphabet

    @property
    def query_modulus(self) -> int:
        return self._spec.query_modulus

    @property
    def calls(self) -> int:
        return self._counter.calls

    def ask(self, x: DigitString) -> int:
        return classical_answer(self._spec, x, self._counter)

    def query(self, state: QuantumState, **kwargs) -> QuantumState:
        return apply_quantum_query(state, self._spec, self._counter, **kwargs)

    def reveal(self) -> DigitString:
        """Ground truth for scoring a finished run. Algorithms must not call this."""
        return self._spec.contents


def as_database(oracle: OracleSpec | Database) -> Database:
    return oracle if isinstance(oracle, Database) else Database(oracle)
