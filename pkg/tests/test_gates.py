import cmath
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from osq.errors import DimensionMismatch, NotAntiHermitian
from osq.gates import (
    GateSequence,
    commutator_sequence,
    displacement,
    kerr,
    lattice_chi_t,
    sequence_error,
    squeeze,
    sum_permutation,
    sum_via_kerr,
)
from osq.hilbert import Operator, Structure, fourier_matrix
from osq.operators import cyclic_shift, lowering_operator, number_operator, quadratures

from conftest import max_abs, phase_amp


def brute_sum_matrix(d):
    m = [[0] * (d * d) for _ in range(d * d)]
    for s1 in range(d):
        for s2 in range(d):
            m[s1 * d + (s1 + s2) % d][s1 * d + s2] = 1
    return np.array(m)


def test_sum_permutation_d2_maps_11_to_10():
    p = sum_permutation(2).matrix
    e11 = np.zeros(4)
    e11[3] = 1
    assert np.flatnonzero(p @ e11).tolist() == [2]


def test_sum_permutation_control_zero_is_identity():
    p = sum_permutation(3).matrix
    for s2 in range(3):
        col = p[:, s2]
        assert np.flatnonzero(col).tolist() == [s2]


@pytest.mark.parametrize("d", [1, 2, 3, 4, 7])
def test_sum_permutation_brute_force(d):
    p = sum_permutation(d)
    assert p.structure is Structure.PERMUTATION
    assert np.array_equal(p.matrix, brute_sum_matrix(d))


def test_sum_order_d4():
    p = sum_permutation(4).matrix.real
    assert np.all((p != 0).sum(axis=0) == 1) and np.all((p != 0).sum(axis=1) == 1)
    assert np.array_equal(np.linalg.matrix_power(p, 4), np.eye(16))
    assert not np.array_equal(np.linalg.matrix_power(p, 2), np.eye(16))


def test_kerr_sum_zero_coupling_is_identity():
    assert np.array_equal(sum_via_kerr(5, 0.0).matrix, np.eye(25))


def _kerr_on_pair(d, s1, s2):
    state = [0j] * (d * d)
    for n in range(d):
        state[s1 * d + n] = phase_amp(d, s2, n)
    chi = 2 * math.pi / d
    return [cmath.exp(-1j * chi * (i // d) * (i % d)) * a for i, a in enumerate(state)]


def test_kerr_sum_example_d4():
    out = _kerr_on_pair(4, 1, 2)
    phi3 = [phase_amp(4, 3, n) for n in range(4)]
    fid = abs(sum(a.conjugate() * b for a, b in zip(phi3, out[4:8]))) ** 2
    assert abs(fid - 1) < 1e-12
    # the library operator applied to the same input agrees with the loop oracle
    state = np.kron(np.eye(4)[1], [phase_amp(4, 2, n) for n in range(4)])
    assert max_abs(sum_via_kerr(4).matrix @ state, out) < 1e-12


@pytest.mark.parametrize("d", range(2, 17))
def test_kerr_conjugated_equals_permutation(d):
    i_f = np.kron(np.eye(d), fourier_matrix(d))
    conj = i_f.conj().T @ sum_via_kerr(d, 2 * math.pi / d).matrix @ i_f
    assert max_abs(conj, brute_sum_matrix(d)) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 6])
def test_kerr_sum_adds_labels_for_all_pairs(d):
    for s1 in range(d):
        for s2 in range(d):
            out = _kerr_on_pair(d, s1, s2)
            expected = [0j] * (d * d)
            for n in range(d):
                expected[s1 * d + n] = phase_amp(d, (s1 + s2) % d, n)
            assert max_abs(out, expected) < 1e-12


def test_kerr_sum_is_diagonal_unit_modulus():
    k = sum_via_kerr(9)
    assert k.structure is Structure.DIAGONAL
    assert max_abs(np.abs(k.diagonal), 1) < 1e-15
    assert lattice_chi_t(9) == 2 * math.pi / 9


def test_displacement_zero_is_identity():
    assert np.array_equal(displacement(7, 0).matrix, np.eye(7))


def test_displacement_coherent_state_d64():
    coeffs = np.array([math.exp(-0.5) / math.sqrt(math.factorial(n)) for n in range(64)])
    coeffs /= np.linalg.norm(coeffs)
    state = displacement(64, 1.0).matrix[:, 0]
    assert abs(np.vdot(coeffs, state)) ** 2 > 0.999999


def test_displacement_inverse():
    a = 0.3 + 0.4j
    assert max_abs(displacement(16, a).matrix @ displacement(16, -a).matrix, np.eye(16)) < 1e-10


@given(st.complex_numbers(max_magnitude=0.5), st.complex_numbers(max_magnitude=0.5))
def test_displacement_composition_low_fock_block(alpha, beta):
    d = 64
    left = displacement(d, alpha).matrix @ displacement(d, beta).matrix
    right = cmath.exp(1j * (alpha * beta.conjugate()).imag) * displacement(d, alpha + beta).matrix
    # the law only holds away from the cutoff, so compare the action on |n>, n < d/2
    assert max_abs(left[:, : d // 2], right[:, : d // 2]) < 1e-8


def test_squeeze_zero_and_parity():
    assert np.array_equal(squeeze(5, 0).matrix, np.eye(5))
    a = lowering_operator(12).matrix
    gen = 0.5 * (np.conj(0.4 - 0.2j) * a @ a - (0.4 - 0.2j) * a.conj().T @ a.conj().T)
    rows, cols = np.nonzero(gen)
    assert np.all(np.abs(rows - cols) == 2)
    s = squeeze(12, 0.4 - 0.2j).matrix
    odd = (np.add.outer(np.arange(12), np.arange(12)) % 2) == 1
    assert np.max(np.abs(s[odd])) < 1e-14


def test_squeezed_vacuum_variance():
    d = 64
    x, _ = quadratures(d)
    psi = squeeze(d, 0.5).matrix[:, 0]
    mean = np.vdot(psi, x @ psi).real
    var = np.vdot(psi, x @ x @ psi).real - mean**2
    assert abs(var - math.exp(-1) / 2) / (math.exp(-1) / 2) < 0.02


def test_kerr_gate():
    assert np.array_equal(kerr(4, 0.0).matrix, np.eye(4))
    assert max_abs(kerr(3, math.pi).matrix, np.diag([1, -1, 1])) < 1e-14
    k, n = kerr(6, 0.37).matrix, number_operator(6).matrix
    assert np.array_equal(k @ n, n @ k)


@pytest.mark.parametrize("gate", [
    lambda d: displacement(d, 0.8 - 0.3j),
    lambda d: squeeze(d, 0.5 + 0.2j),
    lambda d: kerr(d, 0.77),
    lambda d: sum_via_kerr(d),
])
def test_unitarity_d64(gate):
    assert gate(64).unitarity_residual() < 1e-10


def test_structured_residual_matches_dense():
    for op in (sum_via_kerr(5, 0.3), kerr(7, 1.1), sum_permutation(3), cyclic_shift(6)):
        dense = Operator(op.matrix)
        assert abs(op.unitarity_residual() - dense.unitarity_residual()) < 1e-14


def _xp_generators(d):
    x, p = quadratures(d)
    return 1j * x, 1j * p


def test_commutator_sequence_trivial_cases():
    a, b = _xp_generators(8)
    assert max_abs(commutator_sequence(a, a, 0.3).product(), np.eye(8)) < 1e-12
    assert max_abs(commutator_sequence(a, b, 0.0).product(), np.eye(8)) < 1e-15
    with pytest.raises(NotAntiHermitian):
        commutator_sequence(np.array([[1, 0], [0, 1]]), np.zeros((2, 2)), 0.1)


def test_commutator_sequence_third_order():
    a, b = _xp_generators(32)
    errs = []
    for delta in (0.2, 0.1, 0.05):
        target = scipy.linalg.expm((a @ b - b @ a) * delta**2)
        errs.append(np.linalg.norm(commutator_sequence(a, b, delta).product() - target, 2))
    for big, small in zip(errs, errs[1:]):
        assert 6 <= big / small <= 10


def test_sequence_error_examples():
    x = cyclic_shift(2)
    assert sequence_error(GateSequence((x,), 2), x) < 1e-12
    rotated = Operator(x.matrix * cmath.exp(1j * math.pi / 7))
    assert sequence_error(GateSequence((rotated,), 2), x) < 1e-12
    assert sequence_error(GateSequence((rotated,), 2), x, norm="spectral") < 1e-12
    empty = GateSequence((), 2)
    # min over phi of ||I - e^{i phi} X||: 2 in Frobenius norm, sqrt 2 in spectral norm
    assert abs(sequence_error(empty, x) - 2) < 1e-12
    assert abs(sequence_error(empty, x, norm="spectral") - math.sqrt(2)) < 1e-9
    with pytest.raises(DimensionMismatch):
        sequence_error(empty, cyclic_shift(3))


def test_sequence_error_brute_force_phase_scan():
    rng = np.random.default_rng(3)
    u = scipy.linalg.expm(1j * (lambda h: h + h.conj().T)(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))))
    t = cyclic_shift(3)
    scan = min(np.linalg.norm(u - np.exp(1j * p) * t.matrix) for p in np.linspace(0, 2 * np.pi, 20001))
    assert abs(sequence_error(GateSequence((Operator(u),), 3), t) - scan) < 1e-6
