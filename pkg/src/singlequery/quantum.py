"""Dense state vectors over named registers.

Basis indices are mixed-radix with the first-listed register most
significant, so a state on ``[("X", dx), ("B", db)]`` reshapes to a
``(dx, db)`` array. Transforms return new states; amplitudes are read-only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, InvariantViolation, LayoutError

NORM_TOL = 1e-10
ENTROPY_CUTOFF = 1e-12
MAX_ENTROPY_DIM = 4096


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        regs = tuple((str(name), int(dim)) for name, dim in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate register names in {names}")
        for name, dim in regs:
            if dim < 2:
                raise LayoutError(f"register {name!r} has dimension {dim} < 2")

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.registers]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.registers)

    @property
    def total_dimension(self) -> int:
        return math.prod(self.shape)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LayoutError(f"no register named {name!r} in {self.names}") from None

    def dim(self, name: str) -> int:
        return self.shape[self.axis(name)]

    def __add__(self, other: "RegisterLayout") -> "RegisterLayout":
        return RegisterLayout(self.registers + other.registers)


class QuantumState:
    """Normalized amplitude vector with its register layout."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes, check: bool = True, copy: bool = True):
        if copy:
            amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        else:
            amps = np.ascontiguousarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != layout.total_dimension:
            raise DimensionError(
                f"{amps.size} amplitudes for layout of dimension {layout.total_dimension}"
            )
        if check:
            norm2 = float(np.vdot(amps, amps).real)
            if abs(norm2 - 1.0) > NORM_TOL:
                raise InvariantViolation(f"state norm^2 is {norm2}, expected 1")
        amps.flags.writeable = False
        self.layout = layout
        self.amplitudes = amps

    @classmethod
    def basis(cls, layout: RegisterLayout, **values: int) -> "QuantumState":
        """Computational basis state; unnamed registers default to 0."""
        amps = np.zeros(layout.shape, dtype=np.complex128)
        pos = tuple(values.get(name, 0) for name in layout.names)
        for (name, dim), v in zip(layout.registers, pos):
            if not 0 <= v < dim:
                raise LayoutError(f"value {v} out of range for register {name!r}")
        amps[pos] = 1.0
        return cls(layout, amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __matmul__(self, other: "QuantumState") -> "QuantumState":
        """Tensor product, ``self`` registers first."""
        return QuantumState(
            self.layout + other.layout,
            np.kron(self.amplitudes, other.amplitudes),
        )

    def __repr__(self) -> str:
        return f"QuantumState({self.layout.registers})"


def _with_register_last(state: QuantumState, register: str) -> tuple[np.ndarray, int]:
    axis = state.layout.axis(register)
    return np.moveaxis(state.tensor(), axis, -1), axis


def _from_register_last(state: QuantumState, arr: np.ndarray, axis: int) -> QuantumState:
    return QuantumState(state.layout, np.moveaxis(arr, -1, axis))


def phase_eigenstate(dim: int, omega: complex, name: str = "B") -> QuantumState:
    """``sum_b omega**b |b> / sqrt(dim)`` on a single register.

    Adding ``a`` (mod dim) to the register multiplies this state by ``omega**-a``.
    """
    if abs(omega**dim - 1) > 1e-9 or abs(abs(omega) - 1) > 1e-12:
        raise DomainError(f"{omega} is not a {dim}-th root of unity")
    b = np.arange(dim)
    # integer powers keep -1 and roots of unity exact where possible
    amps = np.array([omega**int(k) for k in b], dtype=np.complex128) / math.sqrt(dim)
    return QuantumState(RegisterLayout(((name, dim),)), amps)


def root_of_unity(a: int) -> complex:
    """``exp(2 pi i / a)``, returned exactly as -1 for ``a = 2``."""
    if a == 2:
        return -1 + 0j
    return cmath.exp(2j * math.pi / a)


def uniform_state(dim: int, name: str) -> QuantumState:
    return QuantumState(RegisterLayout(((name, dim),)), np.full(dim, 1 / math.sqrt(dim)))


_BLOCK_BITS = 6


def _hadamard_matrix(bits: int) -> np.ndarray:
    h = np.ones((1, 1))
    for _ in range(bits):
        h = np.block([[h, h], [h, -h]])
    return h


_HADAMARD_BLOCKS = [_hadamard_matrix(b) for b in range(_BLOCK_BITS + 1)]


def _fwht(arr: np.ndarray, axis: int) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along ``axis``.

    The ``2**p`` transform factors into Hadamard blocks on disjoint groups
    of index bits; each group of up to six bits is one batched matmul.
    """
    shape = arr.shape
    dim = shape[axis]
    p = dim.bit_length() - 1
    pre = math.prod(shape[:axis])
    post = math.prod(shape[axis + 1 :])
    out = np.asarray(arr, dtype=np.complex128)
    low = 0
    while low < p:
        bits = min(_BLOCK_BITS, p - low)
        width = 2**bits
        view = out.reshape(pre * (dim >> (low + bits)), width, (2**low) * post)
        out = np.matmul(_HADAMARD_BLOCKS[bits], view)
        low += bits
    return out.reshape(shape)


def hadamard_all(state: QuantumState, register: str) -> QuantumState:
    """Apply ``R`` to every qubit of ``register`` (dimension ``2**p``)."""
    dim = state.layout.dim(register)
    if dim & (dim - 1):
        raise LayoutError(f"register {register!r} has dimension {dim}, not a power of two")
    out = _fwht(state.tensor(), state.layout.axis(register))
    out /= math.sqrt(dim)
    return QuantumState(state.layout, out, check=False, copy=False)


def _digit_count(dim: int, a: int) -> int:
    m, d = 0, dim
    while d % a == 0 and d > 1:
        d //= a
        m += 1
    if d != 1:
        raise LayoutError(f"dimension {dim} is not a power of {a}")
    return m


@lru_cache(maxsize=32)
def _fourier_block(modulus: int, digits: int) -> np.ndarray:
    """``omega**(s.z) / sqrt(A**c)`` over all pairs of ``c``-digit strings."""
    from .algebra import all_strings

    strings = all_strings(digits, modulus)
    phase = (strings @ strings.T) % modulus
    block = np.exp(2j * np.pi * phase / modulus) / math.sqrt(modulus**digits)
    block.flags.writeable = False
    return block


def fourier_all(state: QuantumState, register: str, modulus: int) -> QuantumState:
    """``|s> -> A**(-m/2) sum_z omega**(s.z) |z>`` on an ``A**m``-dimensional register.

    Applied a few digits at a time, each group as one dense block.
    """
    if modulus < 2:
        raise DomainError("modulus must be >= 2")
    dim = state.layout.dim(register)
    m = _digit_count(dim, modulus)
    shape = state.layout.shape
    axis = state.layout.axis(register)
    pre = math.prod(shape[:axis])
    post = math.prod(shape[axis + 1 :])
    per_block = max(1, int(math.log(16, modulus) + 1e-9))
    out = state.tensor()
    low = 0
    while low < m:
        c = min(per_block, m - low)
        width = modulus**c
        view = out.reshape(pre * (dim // (modulus ** (low + c))), width, (modulus**low) * post)
        out = np.matmul(_fourier_block(modulus, c), view)
        low += c
    return QuantumState(state.layout, out, check=False, copy=False)


def register_probabilities(state: QuantumState, register: str) -> np.ndarray:
    arr, _ = _with_register_last(state, register)
    probs = np.abs(arr) ** 2
    return probs.reshape(-1, probs.shape[-1]).sum(axis=0)


def _check_normalized(state: QuantumState) -> None:
    norm2 = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise InvariantViolation(f"state norm^2 is {norm2}, expected 1")


def measure_register(state: QuantumState, register: str) -> tuple[int, float]:
    """Most probable outcome on ``register`` and its Born probability."""
    _check_normalized(state)
    probs = register_probabilities(state, register)
    outcome = int(np.argmax(probs))
    return outcome, float(probs[outcome])


def sample_register(state: QuantumState, register: str, seed) -> tuple[int, float]:
    """Draw one outcome from the Born distribution of ``register``."""
    _check_normalized(state)
    probs = register_probabilities(state, register)
    rng = np.random.default_rng(seed)
    outcome = int(rng.choice(probs.size, p=probs / probs.sum()))
    return outcome, float(probs[outcome])


def inner_product(s1: QuantumState, s2: QuantumState) -> complex:
    """``<s1|s2>``."""
    if s1.layout != s2.layout:
        raise DimensionError("states have different layouts")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def reduced_density(state: QuantumState, register: str) -> np.ndarray:
    """Density matrix of ``register`` with every other register traced out."""
    arr, _ = _with_register_last(state, register)
    flat = arr.reshape(-1, arr.shape[-1])
    return flat.T @ flat.conj()


def register_fidelity(state: QuantumState, register: str, target: QuantumState) -> float:
    """``<phi|rho|phi>`` for the reduced state of ``register`` and pure ``target``."""
    phi = target.amplitudes
    if phi.size != state.layout.dim(register):
        raise DimensionError("target dimension differs from the register's")
    rho = reduced_density(state, register)
    return float(np.real(phi.conj() @ rho @ phi))


def von_neumann_entropy(ensemble: Sequence[tuple[float, QuantumState]]) -> float:
    """Entropy in bits of ``rho = sum_y p_y |psi_y><psi_y|``."""
    if not ensemble:
        raise DomainError("empty ensemble")
    probs = np.array([p for p, _ in ensemble], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-10:
        raise DomainError(f"probabilities must be non-negative and sum to 1, got {probs.sum()}")
    layout = ensemble[0][1].layout
    if any(s.layout != layout for _, s in ensemble):
        raise DimensionError("ensemble states have different layouts")
    if layout.total_dimension > MAX_ENTROPY_DIM:
        raise DomainError(f"dimension {layout.total_dimension} too large for dense entropy")
    vecs = np.stack([s.amplitudes for _, s in ensemble], axis=1) * np.sqrt(probs)
    rho = vecs @ vecs.conj().T
    eig = np.linalg.eigvalsh(rho)
    eig = eig[eig > ENTROPY_CUTOFF]
    return float(-(eig * np.log2(eig)).sum())
