"""Number, ladder, phase and generalized Pauli operators on the truncated space."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import Operator, check_dim, phase_state_vector
from .linalg import expi_hermitian

#: Largest allowed max-entry gap between exp(i theta) and the cyclic shift.
SHIFT_TOL = 1e-10


class PauliConstructionError(ArithmeticError):
    pass


def number_operator(d) -> Operator:
    d = check_dim(d)
    return Operator.from_diagonal(np.arange(d, dtype=complex))


def lowering_operator(d) -> Operator:
    """Truncated annihilation operator, ``a|n> = sqrt(n)|n-1>``."""
    d = check_dim(d)
    return Operator(np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex))


def raising_operator(d) -> Operator:
    return lowering_operator(d).dagger()


def quadratures(d):
    """Return ``(x, p)`` with ``x = (a + a^H)/sqrt 2`` and ``p = -i (a - a^H)/sqrt 2``."""
    a = lowering_operator(d).matrix
    ad = a.conj().T
    return (a + ad) / math.sqrt(2), -1j * (a - ad) / math.sqrt(2)


def phase_operator(d) -> Operator:
    """Pegg-Barnett phase operator, built spectrally from the phase states.

    ``theta = sum_k (2 pi k / d) |phi_k><phi_k|``.
    """
    d = check_dim(d)
    vecs = np.stack([phase_state_vector(d, k) for k in range(d)], axis=1)
    phases = 2 * np.pi * np.arange(d) / d
    theta = (vecs * phases) @ vecs.conj().T
    return Operator(0.5 * (theta + theta.conj().T))


def cyclic_shift(d) -> Operator:
    """Permutation ``|n> -> |n+1 mod d>``."""
    d = check_dim(d)
    return Operator.from_permutation((np.arange(d) + 1) % d)


def clock(d) -> Operator:
    """``exp(i (2 pi/d) N) = diag(1, w, ..., w**(d-1))`` with ``w = exp(2 pi i/d)``."""
    d = check_dim(d)
    n = np.arange(d)
    return Operator.from_diagonal(np.exp(2j * np.pi * n / d))


def pauli_generators(d):
    """Generalized Pauli pair ``(X, Z)``.

    ``Z = exp(i (2 pi/d) N)`` and ``X = exp(i theta)``. The exponential of the
    phase operator is evaluated numerically and compared against the cyclic
    shift before the exact permutation is returned; a gap above
    ``SHIFT_TOL`` raises :class:`PauliConstructionError`.
    """
    d = check_dim(d)
    x_exp = expi_hermitian(phase_operator(d).matrix)
    shift = cyclic_shift(d)
    gap = float(np.max(np.abs(x_exp - shift.matrix)))
    if gap >= SHIFT_TOL:
        raise PauliConstructionError(f"exp(i theta) differs from the cyclic shift by {gap:.3g} at d={d}")
    return shift, clock(d)


@dataclass(frozen=True)
class OperatorSet:
    dim: int
    number_op: Operator
    lowering_op: Operator
    phase_op: Operator
    pauli_x: Operator
    pauli_z: Operator

    @classmethod
    def build(cls, d) -> OperatorSet:
        x, z = pauli_generators(d)
        return cls(check_dim(d), number_operator(d), lowering_operator(d), phase_operator(d), x, z)
