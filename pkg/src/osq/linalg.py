"""Matrix exponentials through Hermitian eigendecomposition.

Only (anti-)Hermitian arguments are accepted, so the result is unitary up to
roundoff by construction: ``V diag(exp(i w)) V^H`` with orthonormal ``V``.
"""
import numpy as np

from .errors import NotAntiHermitian

HERMITICITY_TOL = 1e-10


def hermiticity_residual(mat):
    return float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0


def expi_hermitian(h, t=1.0):
    """Return ``exp(i t h)`` for Hermitian ``h``."""
    h = np.asarray(h, dtype=complex)
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def expm_antihermitian(g):
    """Return ``exp(g)`` for anti-Hermitian ``g``.

    Raises :class:`NotAntiHermitian` when ``-i g`` is not Hermitian to
    within ``HERMITICITY_TOL``.
    """
    g = np.asarray(g, dtype=complex)
    h = -1j * g
    if hermiticity_residual(h) > HERMITICITY_TOL:
        raise NotAntiHermitian(f"generator is not anti-Hermitian (residual {hermiticity_residual(h):.3g})")
    return expi_hermitian(h)
