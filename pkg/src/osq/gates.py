"""Gate constructors: SUM (permutation and cross-Kerr forms), displacement,
squeezing, self-Kerr, and the group-commutator composer.

Displacement and squeezing exponentiate the *truncated* generator, so they
are exactly unitary on the simulated space; their distance from the
untruncated gates is a convergence quantity (see :mod:`osq.convergence`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DimensionMismatch, NotAntiHermitian
from .hilbert import Operator, check_dim
from .linalg import HERMITICITY_TOL, expm_antihermitian, hermiticity_residual
from .operators import lowering_operator


@dataclass(frozen=True)
class GateParams:
    alpha: complex = 0j
    zeta: complex = 0j
    kappa_t: float = 0.0
    chi_t: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "zeta", "kappa_t", "chi_t"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def lattice_chi_t(d) -> float:
    """Cross-Kerr phase that advances a phase label by exactly one grid step."""
    return 2 * math.pi / check_dim(d)


def sum_permutation(d) -> Operator:
    """``|s1, s2> -> |s1, s1 + s2 mod d>`` on the d**2 space."""
    d = check_dim(d)
    return Operator.from_permutation(sum_label_map(d), arity=2)


def sum_label_map(d) -> np.ndarray:
    """Flat index ``s1*d + s2`` -> ``s1*d + (s1 + s2) % d``."""
    s1, s2 = np.divmod(np.arange(d * d), d)
    return s1 * d + (s1 + s2) % d


def sum_via_kerr(d, chi_t=None) -> Operator:
    """Cross-Kerr evolution ``exp(-i chi_t N1 N2)``.

    With the default ``chi_t = 2 pi / d`` this maps
    ``|s1>_number (x) |phi_s2>`` to ``|s1>_number (x) |phi_(s1+s2 mod d)>``.
    """
    return Operator.from_diagonal(kerr_phases(d, chi_t), arity=2)


def kerr_phases(d, chi_t=None) -> np.ndarray:
    """Diagonal of ``exp(-i chi_t N1 N2)`` in flat ``n1*d + n2`` order."""
    d = check_dim(d)
    if chi_t is None:
        chi_t = lattice_chi_t(d)
    n = np.arange(d)
    prod = np.outer(n, n).ravel()
    if chi_t == lattice_chi_t(d):
        # reduce on the integer grid so large n1*n2 do not lose phase accuracy
        phase = 2 * np.pi * (prod % d) / d
    else:
        phase = chi_t * prod
    return np.exp(-1j * phase)


def displacement(d, alpha) -> Operator:
    """Glauber displacement ``exp(alpha a^H - conj(alpha) a)``."""
    a = lowering_operator(d).matrix
    alpha = complex(alpha)
    if alpha == 0:
        return Operator(np.eye(a.shape[0], dtype=complex))
    return Operator(expm_antihermitian(alpha * a.conj().T - alpha.conjugate() * a))


def squeeze(d, zeta) -> Operator:
    """Squeeze ``exp((conj(zeta) a^2 - zeta a^H^2) / 2)``."""
    a = lowering_operator(d).matrix
    zeta = complex(zeta)
    if zeta == 0:
        return Operator(np.eye(a.shape[0], dtype=complex))
    a2 = a @ a
    return Operator(expm_antihermitian(0.5 * (zeta.conjugate() * a2 - zeta * a2.conj().T)))


def kerr(d, kappa_t) -> Operator:
    """Self-Kerr ``exp(-i kappa_t N**2)``."""
    d = check_dim(d)
    n = np.arange(d, dtype=float)
    return Operator.from_diagonal(np.exp(-1j * kappa_t * n * n))


@dataclass(frozen=True)
class GateSequence:
    """Operators listed in matrix-product order: ``product() = f[0] @ f[1] @ ...``.

    The last factor acts first on a state.
    """

    factors: tuple[Operator, ...]
    total_dim: int
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if f.dim != self.total_dim:
                raise DimensionMismatch(f"factor of size {f.dim} in a sequence of size {self.total_dim}")

    def __len__(self):
        return len(self.factors)

    def product(self) -> np.ndarray:
        out = np.eye(self.total_dim, dtype=complex)
        for f in self.factors:
            out = out @ f.matrix
        return out


def commutator_sequence(gen_a, gen_b, delta) -> GateSequence:
    """Four-factor group commutator ``e^{A delta} e^{B delta} e^{-A delta} e^{-B delta}``.

    For anti-Hermitian ``A`` and ``B`` the product equals
    ``exp([A, B] delta**2)`` up to an O(delta**3) error, which is how a gate
    set generating ``A`` and ``B`` reaches their commutator.
    """
    mats = [g.matrix if isinstance(g, Operator) else np.asarray(g, dtype=complex) for g in (gen_a, gen_b)]
    if mats[0].shape != mats[1].shape:
        raise DimensionMismatch("generators must have equal shapes")
    for g in mats:
        res = hermiticity_residual(-1j * g)
        if res > HERMITICITY_TOL:
            raise NotAntiHermitian(f"generator is not anti-Hermitian (residual {res:.3g})")
    if delta < 0 or not np.isfinite(delta):
        raise ValueError("delta must be finite and non-negative")
    a, b = mats
    factors = tuple(Operator(expm_antihermitian(s * g * delta)) for s, g in ((1, a), (1, b), (-1, a), (-1, b)))
    return GateSequence(factors, a.shape[0], ("A", "B", "-A", "-B"))


def operator_distance(u, target, norm="fro") -> float:
    """Phase-invariant distance ``min_phi ||u - exp(i phi) target||``.

    ``norm="fro"`` uses the Frobenius norm, whose optimal phase has a closed
    form. ``norm="spectral"`` minimises the largest singular value over the
    phase with a fixed grid followed by a bounded Brent refinement.
    """
    u = np.asarray(u, dtype=complex)
    t = np.asarray(target, dtype=complex)
    if u.shape != t.shape:
        raise DimensionMismatch(f"shapes differ: {u.shape} vs {t.shape}")
    z = np.vdot(t, u)  # tr(t^H u)
    phi0 = float(np.angle(z)) if abs(z) > 0 else 0.0
    if norm == "fro":
        return float(np.linalg.norm(u - np.exp(1j * phi0) * t))
    if norm != "spectral":
        raise ValueError(f"unknown norm {norm!r}")

    def f(phi):
        return float(np.linalg.norm(u - np.exp(1j * phi) * t, 2))

    grid = phi0 + np.linspace(-np.pi, np.pi, 65)[:-1]
    vals = [f(p) for p in grid]
    best = int(np.argmin(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(f, bounds=(grid[best] - step, grid[best] + step), method="bounded",
                          options={"xatol": 1e-12})
    return min(vals[best], float(res.fun))


def sequence_error(seq: GateSequence, target: Operator, norm="fro") -> float:
    """Distance between the sequence product and ``target`` modulo global phase."""
    tmat = target.matrix if isinstance(target, Operator) else np.asarray(target)
    if tmat.shape[0] != seq.total_dim:
        raise DimensionMismatch(f"sequence dimension {seq.total_dim} vs target {tmat.shape[0]}")
    return operator_distance(seq.product(), tmat, norm=norm)
