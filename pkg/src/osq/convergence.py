"""Finite-d convergence metrics for the d -> infinity study."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .gates import displacement, kerr_phases, sum_label_map
from .hilbert import check_dim, fourier_matrix

METRICS = ("sum_equivalence_residual", "displacement_fidelity", "phase_resolution")


def sum_action_pairs(d):
    """Yield ``(s1, s2, kerr_output, expected)`` target vectors for every label pair.

    ``kerr_output`` is the cross-Kerr gate applied to ``|s1> (x) |phi_s2>``
    restricted to the (only nonzero) control block ``s1``; ``expected`` is the
    phase state whose label the permutation SUM assigns to ``(s1, s2)``.
    """
    d = check_dim(d)
    phases = kerr_phases(d).reshape(d, d)
    labels = sum_label_map(d).reshape(d, d) % d
    f = fourier_matrix(d)
    for s1 in range(d):
        out = phases[s1][:, None] * f
        for s2 in range(d):
            yield s1, s2, out[:, s2], f[:, labels[s1, s2]]


def sum_equivalence_residual(d) -> float:
    """Largest amplitude deviation between Kerr-SUM and permutation-SUM action."""
    return max(float(np.max(np.abs(out - exp))) for _, _, out, exp in sum_action_pairs(d))


def sum_pair_infidelities(d) -> np.ndarray:
    inf = np.empty((d, d))
    for s1, s2, out, exp in sum_action_pairs(d):
        inf[s1, s2] = 1.0 - abs(np.vdot(exp, out)) ** 2
    return inf


def coherent_amplitudes(d, alpha) -> np.ndarray:
    """Analytic coherent-state amplitudes for ``n < d``, renormalized after truncation."""
    alpha = complex(alpha)
    n = np.arange(check_dim(d))
    if alpha == 0:
        c = (n == 0).astype(complex)
        return c
    logmag = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    c = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    return c / np.linalg.norm(c)


def displacement_fidelity(d, alpha=1.0) -> float:
    """``|<alpha|D(alpha)|0>|**2`` against the truncated analytic coherent state."""
    state = displacement(d, alpha).matrix[:, 0]
    return float(abs(np.vdot(coherent_amplitudes(d, alpha), state)) ** 2)


def phase_resolution(d) -> float:
    return 2 * math.pi / check_dim(d)


def convergence_rows(d_min, d_max, step=1, metrics=METRICS, alpha=1.0):
    """Rows ``(d, metric, value)`` ordered by ``d`` then by ``METRICS`` order."""
    if not (isinstance(d_min, int) and isinstance(d_max, int) and isinstance(step, int)):
        raise ValueError("d_min, d_max and step must be integers")
    if not 2 <= d_min <= d_max or step < 1:
        raise ValueError(f"need 2 <= d_min <= d_max and step >= 1, got {d_min}, {d_max}, {step}")
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {', '.join(sorted(unknown))}")
    chosen = [m for m in METRICS if m in metrics]
    funcs = {
        "sum_equivalence_residual": sum_equivalence_residual,
        "displacement_fidelity": lambda d: displacement_fidelity(d, alpha),
        "phase_resolution": phase_resolution,
    }
    rows = []
    for d in range(d_min, d_max + 1, step):
        for name in chosen:
            rows.append((d, name, funcs[name](d)))
    return rows
