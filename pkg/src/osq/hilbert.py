"""Truncated-oscillator Hilbert space.

States live in the span of the Fock states ``|0>, ..., |d-1>``. Two
orthonormal computational bases are available: number states and phase
states. Phase states use the convention

    <n|phi_k> = d**-0.5 * exp(-i n 2 pi k / d)

so that ``<phi_k|n> = d**-0.5 * exp(+i phi_k n)``. With this sign the cross-Kerr
evolution ``exp(-i (2 pi/d) N1 N2)`` adds phase labels (see :mod:`osq.gates`).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, InvalidDimension

NORM_TOL = 1e-12


class Basis(str, enum.Enum):
    NUMBER = "number"
    PHASE = "phase"
    GENERAL = "general"

    def __str__(self):
        return self.value


class Structure(str, enum.Enum):
    GENERAL = "general"
    DIAGONAL = "diagonal"
    PERMUTATION = "permutation"

    def __str__(self):
        return self.value


def check_dim(d):
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def _frozen(arr, dtype=complex):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhaseLabel:
    """Grid phase ``2 pi k / d`` stored by its integer index."""

    k: int
    d: int

    def __post_init__(self):
        check_dim(self.d)
        if not 0 <= self.k < self.d:
            raise IndexOutOfRange(f"phase index {self.k} outside [0, {self.d})")

    @property
    def value(self) -> float:
        return 2 * math.pi * self.k / self.d

    def __add__(self, other: PhaseLabel) -> PhaseLabel:
        if other.d != self.d:
            raise DimensionMismatch("phase labels from different dimensions")
        return PhaseLabel((self.k + other.k) % self.d, self.d)


@dataclass(frozen=True, eq=False)
class QuditState:
    amplitudes: np.ndarray
    basis_tag: Basis = Basis.GENERAL

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidDimension("amplitudes must be a non-empty 1-d vector")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state is not unit norm (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_tag", Basis(self.basis_tag))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __repr__(self):
        return f"QuditState(dim={self.dim}, basis_tag={self.basis_tag.value})"


class Operator:
    """Square matrix on ``arity`` qudits plus a structure tag.

    ``dim == d**arity``. Diagonal operators must have exactly-zero
    off-diagonal entries and permutation operators exactly one unit-modulus
    entry per row and column; both are checked when a dense matrix is given.
    Structured operators built with :meth:`from_diagonal` or
    :meth:`from_permutation` keep their compact form and materialize
    :attr:`matrix` only on first access.
    """

    def __init__(self, matrix, structure=Structure.GENERAL, arity=1):
        mat = _frozen(matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidDimension(f"operator must be square, got shape {mat.shape}")
        structure = Structure(structure)
        if structure is Structure.DIAGONAL:
            if np.count_nonzero(mat - np.diag(np.diagonal(mat))):
                raise ValueError("diagonal operator has nonzero off-diagonal entries")
        elif structure is Structure.PERMUTATION:
            nz = mat != 0
            if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
                raise ValueError("permutation operator needs one entry per row and column")
            if np.max(np.abs(np.abs(mat[nz]) - 1)) > 1e-12:
                raise ValueError("permutation operator entries must have unit modulus")
        self.__dict__["matrix"] = mat
        self._init(mat.shape[0], structure, arity)

    def _init(self, dim, structure, arity):
        self.dim = int(dim)
        self.structure = structure
        self.arity = int(arity)
        _ = self.qudit_dim

    @classmethod
    def from_diagonal(cls, diag, arity=1) -> Operator:
        op = cls.__new__(cls)
        op.__dict__["diagonal"] = _frozen(diag).reshape(-1)
        op._init(op.diagonal.shape[0], Structure.DIAGONAL, arity)
        return op

    @classmethod
    def from_permutation(cls, perm, phases=None, arity=1) -> Operator:
        """Column ``j`` carries ``phases[j]`` (default 1) at row ``perm[j]``."""
        perm = np.asarray(perm, dtype=np.int64).reshape(-1)
        if sorted(perm.tolist()) != list(range(perm.shape[0])):
            raise ValueError("perm is not a permutation")
        phases = np.ones(perm.shape[0], dtype=complex) if phases is None else _frozen(phases).reshape(-1)
        if phases.shape != perm.shape or np.max(np.abs(np.abs(phases) - 1), initial=0) > 1e-12:
            raise ValueError("permutation phases must have unit modulus and match perm")
        perm.setflags(write=False)
        op = cls.__new__(cls)
        op.__dict__["permutation"] = (perm, _frozen(phases))
        op._init(perm.shape[0], Structure.PERMUTATION, arity)
        return op

    @cached_property
    def matrix(self) -> np.ndarray:
        if self.structure is Structure.DIAGONAL:
            return _frozen(np.diag(self.diagonal))
        perm, phases = self.permutation
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        mat[perm, np.arange(self.dim)] = phases
        return _frozen(mat)

    @cached_property
    def qudit_dim(self) -> int:
        d = round(self.dim ** (1.0 / self.arity))
        for cand in (d - 1, d, d + 1):
            if cand >= 1 and cand**self.arity == self.dim:
                return cand
        raise InvalidDimension(f"matrix size {self.dim} is not d**{self.arity}")

    @cached_property
    def diagonal(self) -> np.ndarray:
        return _frozen(np.diagonal(self.matrix))

    @cached_property
    def permutation(self) -> tuple[np.ndarray, np.ndarray]:
        """``(perm, phases)`` where column j maps to row ``perm[j]``."""
        perm = np.argmax(self.matrix != 0, axis=0).astype(np.int64)
        phases = self.matrix[perm, np.arange(self.dim)]
        return perm, _frozen(phases)

    def unitarity_residual(self) -> float:
        """``max |U^H U - I|``; exact closed forms for structured operators."""
        if self.structure is Structure.DIAGONAL:
            return float(np.max(np.abs(np.abs(self.diagonal) ** 2 - 1)))
        if self.structure is Structure.PERMUTATION:
            return float(np.max(np.abs(np.abs(self.permutation[1]) ** 2 - 1)))
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))

    def is_unitary(self, tol=1e-10) -> bool:
        return self.unitarity_residual() < tol

    def dagger(self) -> Operator:
        if self.structure is Structure.DIAGONAL:
            return Operator.from_diagonal(self.diagonal.conj(), self.arity)
        if self.structure is Structure.PERMUTATION:
            perm, phases = self.permutation
            inv = np.empty_like(perm)
            inv[perm] = np.arange(self.dim)
            return Operator.from_permutation(inv, phases.conj()[inv], self.arity)
        return Operator(self.matrix.conj().T, self.structure, self.arity)

    def __matmul__(self, other: Operator) -> Operator:
        if not isinstance(other, Operator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot compose {self.dim}x{self.dim} with {other.dim}x{other.dim}")
        if self.structure is Structure.DIAGONAL and other.structure is Structure.DIAGONAL:
            return Operator.from_diagonal(self.diagonal * other.diagonal, self.arity)
        structure = self.structure if self.structure is other.structure else Structure.GENERAL
        return Operator(self.matrix @ other.matrix, structure, self.arity)

    def __repr__(self):
        return f"Operator(dim={self.dim}, structure={self.structure.value}, arity={self.arity})"


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Joint state of ``m`` qudits, each of dimension ``d``.

    ``amplitudes`` has length ``d**m`` in Kronecker (declaration) order and
    ``encodings`` records the basis each qudit was prepared in.
    """

    d: int
    amplitudes: np.ndarray
    encodings: tuple[Basis, ...] = field(default=())

    def __post_init__(self):
        check_dim(self.d)
        amps = _frozen(self.amplitudes)
        encodings = tuple(Basis(e) for e in self.encodings)
        if amps.ndim != 1 or amps.shape[0] != self.d ** len(encodings):
            raise DimensionMismatch(
                f"{len(encodings)} qudits of dimension {self.d} need {self.d ** len(encodings)} amplitudes, "
                f"got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "encodings", encodings)

    @property
    def m(self) -> int:
        return len(self.encodings)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qudit."""
        return self.amplitudes.reshape((self.d,) * self.m)

    def __repr__(self):
        encs = ",".join(e.value for e in self.encodings)
        return f"RegisterState(d={self.d}, m={self.m}, encodings=[{encs}])"


def make_number_state(d, n) -> QuditState:
    """Fock state ``|n>`` with ``0 <= n <= d - 1``."""
    d = check_dim(d)
    if not 0 <= n < d:
        raise IndexOutOfRange(f"number label {n} outside [0, {d})")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return QuditState(amps, Basis.NUMBER)


def phase_state_vector(d, k) -> np.ndarray:
    n = np.arange(d)
    # reduce n*k mod d before scaling so the angle stays exact on the grid
    return np.exp(-2j * np.pi * ((n * k) % d) / d) / math.sqrt(d)


def make_phase_state(d, k) -> QuditState:
    """Phase eigenstate ``|phi_k>`` with eigenvalue ``2 pi k / d``."""
    d = check_dim(d)
    if not 0 <= k < d:
        raise IndexOutOfRange(f"phase label {k} outside [0, {d})")
    return QuditState(phase_state_vector(d, k), Basis.PHASE)


def inner_product(a: QuditState, b: QuditState) -> complex:
    """``<a|b>``, antilinear in the first argument."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def tensor(*parts) -> RegisterState:
    """Kronecker product of single-qudit states (or registers) in order.

    Accepts either ``tensor(a, b, c)`` or ``tensor([a, b, c])``. Registers may
    appear among the parts, which makes the operation associative.
    """
    if len(parts) == 1 and not isinstance(parts[0], (QuditState, RegisterState)):
        parts = tuple(parts[0])
    if not parts:
        raise ValueError("tensor needs at least one part")
    dims = {p.dim if isinstance(p, QuditState) else p.d for p in parts}
    if len(dims) != 1:
        raise DimensionMismatch(f"all parts must share one dimension, got {sorted(dims)}")
    (d,) = dims
    amps = np.ones(1, dtype=complex)
    encodings: list[Basis] = []
    for p in parts:
        amps = np.kron(amps, p.amplitudes)
        if isinstance(p, QuditState):
            encodings.append(p.basis_tag)
        else:
            encodings.extend(p.encodings)
    return RegisterState(d, amps, tuple(encodings))


def fourier_matrix(d) -> np.ndarray:
    d = check_dim(d)
    idx = np.arange(d)
    return np.exp(-2j * np.pi * (np.outer(idx, idx) % d) / d) / math.sqrt(d)


def fourier_operator(d) -> Operator:
    """Basis change ``F|n> = |phi_n>``."""
    return Operator(fourier_matrix(d), Structure.GENERAL, 1)
