"""Encodings ``z = G y``, Huffman query sets and random-code collision analysis."""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import DigitString, GeneratorSet, dot_mod, random_generators
from .errors import DimensionError, DomainError, SearchFailure

PROB_TOL = 1e-10


@dataclass(frozen=True)
class SourceDistribution:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if any(p < 0 for p in probs):
            raise DomainError("probabilities must be non-negative")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> "SourceDistribution":
        w = np.asarray(weights, dtype=float)
        return cls(tuple(w / w.sum()))

    @classmethod
    def uniform(cls, n: int) -> "SourceDistribution":
        return cls((1.0 / n,) * n)

    @property
    def n(self) -> int:
        return len(self.probabilities)

    def entropy(self) -> float:
        """Shannon entropy in bits."""
        return -sum(p * math.log2(p) for p in self.probabilities if p > 0)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class HuffmanCode:
    source: SourceDistribution
    codewords: tuple[DigitString, ...]

    @property
    def n(self) -> int:
        return len(self.codewords)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(c.n for c in self.codewords)

    @property
    def max_length(self) -> int:
        return max(self.lengths)

    def mean_length(self) -> float:
        return float(sum(p * l for p, l in zip(self.source.probabilities, self.lengths)))

    def kraft_sum(self) -> float:
        return sum(2.0**-l for l in self.lengths)

    def is_prefix_free(self) -> bool:
        words = sorted(str(c) for c in self.codewords)
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    def table(self) -> list[dict]:
        """Rows of item index, probability and codeword, for reports."""
        return [
            {"item": i, "probability": p, "codeword": str(c)}
            for i, (p, c) in enumerate(zip(self.source.probabilities, self.codewords))
        ]


def encode(gens: GeneratorSet, y: DigitString) -> DigitString:
    """``z_k = g_k . y mod A`` for each generator."""
    if y.n != gens.n or y.modulus != gens.modulus:
        raise DimensionError("database string does not match the generators")
    return DigitString(tuple(dot_mod(g, y, gens.modulus) for g in gens), gens.modulus)


def encode_rows(matrix: np.ndarray, ys: np.ndarray, modulus: int) -> np.ndarray:
    """Vectorized encode: row ``j`` of the result encodes ``ys[j]``."""
    return (np.asarray(ys, dtype=np.int64) @ np.asarray(matrix, dtype=np.int64).T) % modulus


def build_huffman(source: SourceDistribution) -> HuffmanCode:
    """Binary Huffman code with deterministic tie-breaking.

    Nodes are ordered by (probability, smallest item they contain); the first
    node popped in a merge takes bit 0.
    """
    if source.n < 2:
        raise DomainError("a Huffman code needs at least two items")
    heap = [(p, i, (i,)) for i, p in enumerate(source.probabilities)]
    heapq.heapify(heap)
    suffixes: list[list[int]] = [[] for _ in range(source.n)]
    while len(heap) > 1:
        p0, k0, items0 = heapq.heappop(heap)
        p1, k1, items1 = heapq.heappop(heap)
        for i in items0:
            suffixes[i].append(0)
        for i in items1:
            suffixes[i].append(1)
        heapq.heappush(heap, (p0 + p1, min(k0, k1), items0 + items1))
    # bits were collected leaf-to-root
    words = tuple(DigitString(tuple(reversed(bits)), 2) for bits in suffixes)
    return HuffmanCode(source, words)


def huffman_queries(code: HuffmanCode, m: int) -> list[DigitString]:
    """The first ``m`` classical Huffman queries.

    Bit ``i`` of query ``k`` is bit ``k`` of codeword ``i``, or 0 once that
    codeword has ended.
    """
    if m < 1:
        raise DomainError("m must be at least 1")
    return [
        DigitString(tuple(c.digits[k] if c.n > k else 0 for c in code.codewords), 2)
        for k in range(m)
    ]


def truncated_codewords(code: HuffmanCode, m: int) -> list[tuple[int, ...]]:
    """Each codeword cut to ``m`` bits and zero-padded to exactly ``m``."""
    return [tuple(c.digits[:m]) + (0,) * max(0, m - c.n) for c in code.codewords]


def truncation_error_probability(code: HuffmanCode, m: int) -> float:
    """Mass of the items whose ``m``-bit padded codeword is shared with another item."""
    if m < 1:
        raise DomainError("m must be at least 1")
    groups: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for i, word in enumerate(truncated_codewords(code, m)):
        groups[word].append(i)
    probs = code.source.probabilities
    mass = math.fsum(probs[i] for items in groups.values() if len(items) > 1 for i in items)
    return min(1.0, mass)


def collision_probability(modulus: int, m: int, k: int) -> float:
    """``1 - (1 - A**-m)**(k-1)``: chance another of ``k`` candidates shares y's codeword."""
    if k < 1:
        raise DomainError("k must be >= 1")
    q = float(modulus) ** -m
    return float(-math.expm1((k - 1) * math.log1p(-q)))


def collision_probability_approx(k: int, l: float) -> float:
    """First-order form ``2**-l * (1 - 1/k)``, accurate to ``O(2**-2l)``.

    ``l`` counts the code's bits beyond ``log2 k``; use :func:`slack_bits` for
    codes over ``Z_A`` whose length is rounded up.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    return 2.0**-l * (1 - 1 / k)


def slack_bits(modulus: int, m: int, k: int) -> float:
    """``log2(A**m / k)``, the ``l`` for which ``A**-m == 2**-l / k`` exactly."""
    return m * math.log2(modulus) - math.log2(k)


def collision_probability_independent(modulus: int, m: int, k: int, n: int) -> float:
    """Collision chance when the ``m`` generators are conditioned to be independent.

    A nonzero difference lies in the kernel of a uniformly random full-rank
    ``m x n`` map with probability ``(A**(n-m) - 1) / (A**n - 1)``, slightly
    below ``A**-m``. Treats the ``k - 1`` differences as independent.
    """
    q = (float(modulus) ** (n - m) - 1) / (float(modulus) ** n - 1)
    if k < 1:
        raise DomainError("k must be >= 1")
    return float(-math.expm1((k - 1) * math.log1p(-q)))


def code_length(modulus: int, k: int, l: int) -> int:
    """``ceil(log_A k) + l``, at least 1."""
    c, size = 0, 1
    while size < k:
        size *= modulus
        c += 1
    return max(1, c + l)


def is_injective(gens: GeneratorSet, candidates: Sequence[DigitString]) -> bool:
    ys = np.array([c.digits for c in candidates], dtype=np.int64)
    codes = encode_rows(gens.matrix(), ys, gens.modulus)
    return len({tuple(r) for r in codes}) == len(candidates)


def find_collision_free_generators(
    candidates: Sequence[DigitString],
    modulus: int,
    max_m: int,
    seed,
    attempts_per_m: int = 50,
) -> GeneratorSet:
    """Seeded random search for a code injective on ``candidates``.

    Tries ``m = ceil(2 log_A k)``, then larger ``m`` up to ``max_m``.
    """
    candidates = list(candidates)
    if not candidates:
        raise DomainError("no candidates")
    n = candidates[0].n
    if len({c.digits for c in candidates}) != len(candidates):
        raise DomainError("candidates must be distinct")
    if max_m > n:
        raise DomainError(f"max_m {max_m} exceeds string length {n}")
    k = len(candidates)
    start = 1 if k == 1 else math.ceil(2 * math.log(k, modulus) - 1e-12)
    start = max(1, min(start, max_m))
    rng = np.random.default_rng(seed)
    for m in range(start, max_m + 1):
        for _ in range(attempts_per_m):
            gens = random_generators(n, m, modulus, rng)
            if is_injective(gens, candidates):
                return gens
    raise SearchFailure(f"no collision-free code with m <= {max_m}; retry with another seed")


def random_candidates(k: int, n: int, modulus: int, seed) -> list[DigitString]:
    """``k`` distinct uniformly random strings of length ``n`` over ``Z_A``."""
    if float(modulus) ** n < k:
        raise DomainError(f"only {modulus}**{n} strings exist, cannot pick {k} distinct")
    rng = np.random.default_rng(seed)
    seen: dict[tuple[int, ...], None] = {}
    while len(seen) < k:
        for row in rng.integers(0, modulus, size=(k - len(seen), n)).tolist():
            seen.setdefault(tuple(row), None)
    return [DigitString(row, modulus) for row in list(seen)[:k]]


def _batched_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Rank over ``Z_p`` of every matrix in a ``(batch, rows, cols)`` stack."""
    mat = np.array(mats, dtype=np.int64) % p
    batch, rows, cols = mat.shape
    inverse = np.zeros(p, dtype=np.int64)
    inverse[1:] = [pow(v, -1, p) for v in range(1, p)]
    rank = np.zeros(batch, dtype=np.int64)
    row_ids = np.arange(rows)
    for col in range(cols):
        open_rows = row_ids[None, :] >= rank[:, None]
        eligible = (mat[:, :, col] != 0) & open_rows
        b = np.nonzero(eligible.any(axis=1))[0]
        if b.size == 0:
            if np.all(rank == rows):
                break
            continue
        r = rank[b]
        piv = np.argmax(eligible[b], axis=1)
        top, chosen = mat[b, r].copy(), mat[b, piv].copy()
        mat[b, piv] = top
        mat[b, r] = chosen * inverse[chosen[:, col]][:, None] % p
        factor = mat[b, :, col].copy()
        factor[np.arange(b.size), r] = 0
        mat[b] = (mat[b] - factor[:, :, None] * mat[b, r][:, None, :]) % p
        rank[b] += 1
    return rank


@dataclass(frozen=True)
class CollisionTrials:
    """Seeded random-coding trials: one code, candidate set and marked item each."""

    modulus: int
    n: int
    k: int
    m: int
    generators: np.ndarray  # (trials, m, n)
    candidates: np.ndarray  # (trials, k, n)
    marked: np.ndarray  # (trials,)
    failed: np.ndarray  # (trials,) codeword of the marked candidate is shared

    @property
    def trials(self) -> int:
        return int(self.marked.size)

    def failure_rate(self) -> float:
        return float(self.failed.mean())

    def trial(self, t: int) -> tuple[GeneratorSet, list[DigitString], DigitString]:
        gens = GeneratorSet(
            tuple(DigitString(tuple(r), self.modulus) for r in self.generators[t]), check=False
        )
        cands = [DigitString(tuple(r), self.modulus) for r in self.candidates[t]]
        return gens, cands, cands[int(self.marked[t])]


def collision_trials(
    modulus: int, n: int, k: int, l: int, trials: int, seed, batch: int = 2000
) -> CollisionTrials:
    """Monte Carlo of the classical random-coding decoder.

    Each trial draws ``m = ceil(log_A k) + l`` independent generators,
    ``k`` distinct candidates and a uniformly chosen marked candidate, then
    records whether another candidate shares its codeword.
    """
    m = code_length(modulus, k, l)
    if m > n:
        raise DomainError(f"code length {m} exceeds string length {n}")
    if float(modulus) ** n >= 2**62:
        raise DomainError("strings too long for the packed duplicate check")
    rng = np.random.default_rng(seed)
    weights = modulus ** np.arange(n, dtype=np.int64)
    code_weights = modulus ** np.arange(m, dtype=np.int64)
    gens_out, cands_out, marked_out, failed_out = [], [], [], []
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        gens = rng.integers(0, modulus, size=(size, m, n), dtype=np.int64)
        while True:
            bad = np.nonzero(_batched_rank(gens, modulus) < m)[0]
            if bad.size == 0:
                break
            gens[bad] = rng.integers(0, modulus, size=(bad.size, m, n))
        cands = rng.integers(0, modulus, size=(size, k, n), dtype=np.int64)
        while True:
            keys = np.sort(cands @ weights, axis=1)
            bad = np.nonzero((keys[:, 1:] == keys[:, :-1]).any(axis=1))[0]
            if bad.size == 0:
                break
            cands[bad] = rng.integers(0, modulus, size=(bad.size, k, n))
        marked = rng.integers(0, k, size=size)
        # float32 products are exact: entries stay below n * (A-1)**2
        codes = np.rint(
            np.matmul(cands.astype(np.float32), gens.transpose(0, 2, 1).astype(np.float32))
        ).astype(np.int64) % modulus
        words = codes @ code_weights
        mine = words[np.arange(size), marked]
        failed = (words == mine[:, None]).sum(axis=1) > 1
        gens_out.append(gens.astype(np.int8))
        cands_out.append(cands.astype(np.int8))
        marked_out.append(marked)
        failed_out.append(failed)
        done += size
    return CollisionTrials(
        modulus, n, k, m,
        np.concatenate(gens_out), np.concatenate(cands_out),
        np.concatenate(marked_out), np.concatenate(failed_out),
    )
