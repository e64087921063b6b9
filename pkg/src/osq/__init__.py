"""Qudits in truncated harmonic oscillators: number/phase bases, generalized
Pauli group, cross-Kerr SUM gate, statevector engine and circuit language."""
from .engine import (
    LossModel,
    MeasurementRecord,
    RandomSource,
    apply_gate,
    apply_loss,
    check_sum_encoding,
    init_register,
    measure,
    run_shots,
)
from .gates import (
    commutator_sequence,
    displacement,
    kerr,
    sequence_error,
    squeeze,
    sum_permutation,
    sum_via_kerr,
)
from .hilbert import (
    Basis,
    Operator,
    PhaseLabel,
    QuditState,
    RegisterState,
    Structure,
    fourier_operator,
    inner_product,
    make_number_state,
    make_phase_state,
    tensor,
)
from .operators import lowering_operator, number_operator, pauli_generators, phase_operator

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "LossModel",
    "MeasurementRecord",
    "Operator",
    "PhaseLabel",
    "QuditState",
    "RandomSource",
    "RegisterState",
    "Structure",
    "__version__",
    "apply_gate",
    "apply_loss",
    "check_sum_encoding",
    "commutator_sequence",
    "displacement",
    "fourier_operator",
    "init_register",
    "inner_product",
    "kerr",
    "lowering_operator",
    "make_number_state",
    "make_phase_state",
    "measure",
    "number_operator",
    "pauli_generators",
    "phase_operator",
    "run_shots",
    "sequence_error",
    "squeeze",
    "sum_permutation",
    "sum_via_kerr",
    "tensor",
]
