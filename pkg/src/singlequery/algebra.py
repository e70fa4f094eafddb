"""Digit strings over Z_A, Walsh generators and generator sets.

A digit string stores position ``i = 1..n`` at offset ``i - 1`` and prints
in that same order, so ``walsh_generators(8)[0]`` prints as ``01010101``.
Basis-state indices use the same little-endian rule: the string ``d`` over
``Z_A`` sits at index ``sum(d[i] * A**i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, SearchFailure

MAX_RANDOM_ATTEMPTS = 1000


def _is_prime(a: int) -> bool:
    if a < 2:
        return False
    return all(a % p for p in range(2, int(a**0.5) + 1))


@dataclass(frozen=True)
class DigitString:
    """An immutable string of digits in ``0..modulus-1``."""

    digits: tuple[int, ...]
    modulus: int = 2

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        object.__setattr__(self, "digits", digits)
        if self.modulus < 2:
            raise DomainError(f"modulus must be >= 2, got {self.modulus}")
        if len(digits) < 1:
            raise DomainError("a digit string needs at least one digit")
        bad = [d for d in digits if not 0 <= d < self.modulus]
        if bad:
            raise DomainError(f"digits {bad} out of range for modulus {self.modulus}")

    @classmethod
    def parse(cls, text: str, modulus: int = 2) -> "DigitString":
        """Read ``"00110011"`` or, for any modulus, ``"(1,2,0)"``."""
        text = text.strip()
        if text.startswith("("):
            body = text.strip("()")
            return cls(tuple(int(t) for t in body.split(",")), modulus)
        if modulus > 10:
            raise DomainError("moduli above 10 need the comma-separated form")
        return cls(tuple(int(c) for c in text), modulus)

    @classmethod
    def zeros(cls, n: int, modulus: int = 2) -> "DigitString":
        return cls((0,) * n, modulus)

    @classmethod
    def unit(cls, n: int, offset: int, modulus: int = 2) -> "DigitString":
        """The weight-one string with a 1 at ``offset`` (0-based)."""
        digits = [0] * n
        digits[offset] = 1
        return cls(tuple(digits), modulus)

    @classmethod
    def from_index(cls, index: int, n: int, modulus: int = 2) -> "DigitString":
        return cls(tuple(index_to_digits(index, n, modulus)), modulus)

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def index(self) -> int:
        """Little-endian basis index of this string."""
        return digits_to_index(self.digits, self.modulus)

    @property
    def weight(self) -> int:
        return sum(1 for d in self.digits if d)

    def array(self) -> np.ndarray:
        return np.asarray(self.digits, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.digits)

    def __add__(self, other: "DigitString") -> "DigitString":
        _check_compatible(self, other)
        a = self.modulus
        return DigitString(tuple((x + y) % a for x, y in zip(self.digits, other.digits)), a)

    def __sub__(self, other: "DigitString") -> "DigitString":
        _check_compatible(self, other)
        a = self.modulus
        return DigitString(tuple((x - y) % a for x, y in zip(self.digits, other.digits)), a)

    def __str__(self) -> str:
        if self.modulus <= 10:
            return "".join(str(d) for d in self.digits)
        return "(" + ",".join(str(d) for d in self.digits) + ")"


def _check_compatible(x: DigitString, y: DigitString) -> None:
    if x.n != y.n:
        raise DimensionError(f"length mismatch: {x.n} != {y.n}")
    if x.modulus != y.modulus:
        raise DimensionError(f"modulus mismatch: {x.modulus} != {y.modulus}")


def index_to_digits(index: int, n: int, modulus: int) -> list[int]:
    out = []
    for _ in range(n):
        index, d = divmod(index, modulus)
        out.append(d)
    if index:
        raise DomainError(f"index does not fit in {n} digits base {modulus}")
    return out


def digits_to_index(digits: Iterable[int], modulus: int) -> int:
    index = 0
    for d in reversed(tuple(digits)):
        index = index * modulus + int(d)
    return index


@lru_cache(maxsize=64)
def _all_strings(n: int, modulus: int) -> np.ndarray:
    idx = np.arange(modulus**n, dtype=np.int64)
    cols = [(idx // modulus**i) % modulus for i in range(n)]
    table = np.stack(cols, axis=1).astype(np.int64)
    table.flags.writeable = False
    return table


def all_strings(n: int, modulus: int = 2) -> np.ndarray:
    """Every length-``n`` string over ``Z_modulus``, row ``j`` has index ``j``.

    The returned array is shared and read-only.
    """
    return _all_strings(n, modulus)


def dot_mod(x: DigitString, y: DigitString, modulus: int | None = None) -> int:
    """Return ``sum(x_i * y_i) mod A``."""
    if x.n != y.n:
        raise DimensionError(f"length mismatch: {x.n} != {y.n}")
    a = x.modulus if modulus is None else modulus
    for s in (x, y):
        if any(d >= a for d in s.digits):
            raise DimensionError(f"{s} has digits outside Z_{a}")
    return sum(p * q for p, q in zip(x.digits, y.digits)) % a


def hamming_and_weight(x: DigitString, y: DigitString) -> int:
    """Number of positions where both binary strings hold a 1."""
    if x.n != y.n:
        raise DimensionError(f"length mismatch: {x.n} != {y.n}")
    if x.modulus != 2 or y.modulus != 2:
        raise DimensionError("hamming_and_weight takes binary strings")
    return sum(p & q for p, q in zip(x.digits, y.digits))


@dataclass(frozen=True)
class GeneratorSet:
    """``m`` linearly independent strings of common length and modulus."""

    generators: tuple[DigitString, ...]
    # skip the rank test for sets independent by construction
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise DomainError("a generator set needs at least one generator")
        n, a = gens[0].n, gens[0].modulus
        for g in gens:
            if g.n != n or g.modulus != a:
                raise DimensionError("generators must share length and modulus")
        if len(gens) > n:
            raise DomainError(f"{len(gens)} generators cannot be independent in length {n}")
        if self.check and _is_prime(a) and not is_linearly_independent(gens, a):
            raise DomainError("generators are linearly dependent")

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def n(self) -> int:
        return self.generators[0].n

    @property
    def modulus(self) -> int:
        return self.generators[0].modulus

    def matrix(self) -> np.ndarray:
        """Generators as rows of an ``m x n`` integer array."""
        return np.array([g.digits for g in self.generators], dtype=np.int64)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, k: int) -> DigitString:
        return self.generators[k]


def walsh_generators(n: int) -> GeneratorSet:
    """Generators ``g_1..g_p`` of the Walsh group for ``n = 2**p``.

    ``g_k`` alternates runs of ``2**(k-1)`` zeros and ones, starting with zeros.
    """
    if n < 2 or n & (n - 1):
        raise DomainError(f"n must be a power of two >= 2, got {n}; pad the database")
    p = n.bit_length() - 1
    gens = [
        DigitString(tuple((j >> (k - 1)) & 1 for j in range(n)), 2)
        for k in range(1, p + 1)
    ]
    return GeneratorSet(tuple(gens), check=False)


def expand_member(gens: GeneratorSet, s: DigitString) -> DigitString:
    """Group element ``sum_i s_i * g_i`` (digit-wise, mod A)."""
    if s.n != gens.m:
        raise DimensionError(f"selector has length {s.n}, expected {gens.m}")
    if s.modulus != gens.modulus:
        raise DimensionError("selector modulus differs from the generators'")
    row = (s.array() @ gens.matrix()) % gens.modulus
    return DigitString(tuple(row), gens.modulus)


def member_table(gens: GeneratorSet) -> np.ndarray:
    """All ``A**m`` group elements, row ``j`` is ``expand_member(gens, s)`` with ``s.index == j``."""
    a, n, m = gens.modulus, gens.n, gens.m
    # digits stay below m*(A-1); reduce once at the end when that fits int16
    reduce_late = m * (a - 1) < 2**15
    table = np.zeros((1, n), dtype=np.int16 if reduce_late else np.int64)
    for g in gens.matrix():
        multiples = ((np.arange(a)[:, None] * g[None, :]) % a).astype(table.dtype)
        # the new selector digit becomes the most significant one
        table = (multiples[:, None, :] + table[None, :, :]).reshape(-1, n)
        if not reduce_late:
            table %= a
    if reduce_late:
        table %= a
    return table


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over the field ``Z_p`` by Gaussian elimination."""
    mat = np.array(rows, dtype=np.int64) % p
    if mat.ndim != 2:
        raise DimensionError("expected a 2-d array")
    n_rows, n_cols = mat.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivots = np.nonzero(mat[rank:, col])[0]
        if pivots.size == 0:
            continue
        piv = rank + pivots[0]
        if piv != rank:
            mat[[rank, piv]] = mat[[piv, rank]]
        inv = pow(int(mat[rank, col]), -1, p)
        mat[rank] = (mat[rank] * inv) % p
        others = np.nonzero(mat[:, col])[0]
        others = others[others != rank]
        if others.size:
            mat[others] = (mat[others] - np.outer(mat[others, col], mat[rank])) % p
        rank += 1
    return rank


def is_linearly_independent(gens: Sequence[DigitString], modulus: int) -> bool:
    """True iff no nontrivial ``Z_A`` combination of ``gens`` vanishes (A prime)."""
    if not _is_prime(modulus):
        raise DomainError(f"modulus {modulus} is not prime; Z_A is not a field")
    gens = list(gens)
    if not gens:
        return True
    if len({g.n for g in gens}) != 1:
        raise DimensionError("generators differ in length")
    if len(gens) > gens[0].n:
        return False
    rows = np.array([g.digits for g in gens], dtype=np.int64)
    return rank_mod_p(rows, modulus) == len(gens)


def random_generators(n: int, m: int, modulus: int, seed: int | np.random.Generator) -> GeneratorSet:
    """Draw ``m`` uniformly random, linearly independent strings of length ``n``.

    Whole sets are redrawn until independent, at most 1000 times.
    """
    if m > n:
        raise DomainError(f"cannot pick {m} independent strings of length {n}")
    if m < 1:
        raise DomainError("m must be at least 1")
    if not _is_prime(modulus):
        raise DomainError(f"modulus {modulus} is not prime")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RANDOM_ATTEMPTS):
        rows = rng.integers(0, modulus, size=(m, n))
        if rank_mod_p(rows, modulus) == m:
            return GeneratorSet(tuple(DigitString(tuple(r), modulus) for r in rows), check=False)
    raise SearchFailure(f"no independent set after {MAX_RANDOM_ATTEMPTS} draws")
