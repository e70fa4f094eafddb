"""Query-count bounds and running-time formulas.

Times are in elementary gate steps. ``T`` is the time the database circuit
takes to answer one query of an ``n``-item database.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

from .errors import DomainError

ALGORITHMS = ("coin_weighing", "walsh_search", "huffman_search", "random_coding")
MODES = ("serial_xor", "parallel_xor")

T_PRESETS: dict[str, Callable[[int], float]] = {
    "log": lambda n: math.log2(n) if n > 1 else 0.0,
    "linear": lambda n: float(n),
    "quadratic": lambda n: float(n) ** 2,
}


@dataclass(frozen=True)
class CostReport:
    algorithm: str
    n: int
    m: int | None
    mode: str
    quantum_time: float
    classical_time: float
    bound_queries: float | None
    preparation_time: float | None = None
    extrapolated: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def info_bound(entropy_bits: float, answers: int) -> float:
    """Fewest queries any classical strategy can need: ``H(Y) / log2 A``."""
    if entropy_bits < 0 or answers < 2:
        raise DomainError("need H >= 0 and at least two answers")
    return entropy_bits / math.log2(answers)


def coin_bound(n: int) -> float:
    """``n / log2(n + 1)`` weighings for ``n`` equiprobable coin sets."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return n / math.log2(n + 1)


def predetermined_limit(n: int) -> float:
    """Asymptotic weighings of the best predetermined strategy, ``2n / log2 n``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return 2 * n / math.log2(n)


def resolve_t(t: Callable[[int], float] | str | float) -> Callable[[int], float]:
    if isinstance(t, str):
        try:
            return T_PRESETS[t]
        except KeyError:
            raise DomainError(f"unknown T preset {t!r}; pick one of {sorted(T_PRESETS)}") from None
    if callable(t):
        return t
    value = float(t)
    return lambda n: value


def runtime(
    algorithm: str,
    n: int,
    m: int | None = None,
    t: Callable[[int], float] | str | float = "log",
    mode: str = "serial_xor",
) -> CostReport:
    """Quantum and classical running times for one recovery.

    ``parallel_xor`` lets a multi-bit XOR finish in one step (ion-trap bus
    modes). For the Huffman and random-coding circuits that is an
    extrapolation and the report says so.
    """
    if algorithm not in ALGORITHMS:
        raise DomainError(f"unknown algorithm {algorithm!r}")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    tn = resolve_t(t)(n)
    parallel = mode == "parallel_xor"
    prep = None
    extrapolated = False

    if algorithm == "coin_weighing":
        quantum = 2 + tn
        classical = n * tn / math.log2(n + 1)
        bound = coin_bound(n)
    elif algorithm == "walsh_search":
        if n < 2 or n & (n - 1):
            raise DomainError("walsh_search needs n a power of two")
        logn = math.log2(n)
        quantum = 2 + (logn if parallel else n * logn) + tn
        classical = logn / 2 + tn * logn
        prep = 1 + (n / 2) * logn
        bound = logn
    else:
        if m is None:
            raise DomainError(f"{algorithm} needs the number of queries m")
        quantum = 2 + (m if parallel else m * n) + tn
        classical = m / 2 + m * tn
        bound = None
        extrapolated = parallel

    return CostReport(
        algorithm=algorithm,
        n=n,
        m=m,
        mode=mode,
        quantum_time=float(quantum),
        classical_time=float(classical),
        bound_queries=bound,
        preparation_time=prep,
        extrapolated=extrapolated,
    )


def crossover(
    algorithm: str,
    t: Callable[[int], float] | str | float,
    m: int | None = None,
    mode: str = "serial_xor",
    n_max: int = 2**16,
) -> int | None:
    """Smallest ``n`` from which the quantum time stays below the classical one.

    Scans ``n = 1..n_max`` (powers of two for Walsh search) and returns None
    when the quantum side is still behind at ``n_max``.
    """
    if algorithm == "walsh_search":
        sizes = [2**p for p in range(1, n_max.bit_length()) if 2**p <= n_max]
    else:
        sizes = range(1, n_max + 1)
    first = None
    for n in sizes:
        r = runtime(algorithm, n, m, t, mode)
        if r.quantum_time < r.classical_time:
            first = n if first is None else first
        else:
            first = None
    return first
