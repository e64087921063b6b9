"""Multi-qudit statevector engine.

Registers are prepared from per-qudit specs, evolved by structured operators,
measured projectively in the number or phase basis, and optionally damped by
photon loss sampled one Kraus outcome at a time (pure-state trajectories).

Randomness comes from :class:`RandomSource`, a Philox4x64 counter generator
keyed by the 64-bit seed. Shot ``i`` of :func:`run_shots` uses the stream whose
most significant counter word is ``i``, so any shot can be replayed alone.
"""
from __future__ import annotations

import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import comb

from . import kernels
from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    InvalidTargets,
    NotUnitary,
    ResourceCapExceeded,
    ZeroNorm,
)
from .hilbert import (
    Basis,
    Operator,
    RegisterState,
    Structure,
    check_dim,
    fourier_matrix,
    make_number_state,
    make_phase_state,
)

log = logging.getLogger(__name__)

DEFAULT_AMP_CAP = 2**20
UNITARY_TOL = 1e-8
CUSTOM_NORM_TOL = 1e-8


def amplitude_cap() -> int:
    """Amplitude cap, overridable through ``OSQ_AMP_CAP``."""
    raw = os.environ.get("OSQ_AMP_CAP")
    if raw:
        return int(raw)
    return DEFAULT_AMP_CAP


def check_register_size(d, m, cap=None):
    cap = amplitude_cap() if cap is None else cap
    if d**m > cap:
        raise ResourceCapExceeded(f"{m} qudits of dimension {d} need {d**m} amplitudes; cap is {cap}")


# ------------------------------------------------------------------ records

@dataclass(frozen=True)
class MeasurementRecord:
    qudit_index: int
    basis: Basis
    outcome: int
    probability: float


@dataclass(frozen=True)
class LossModel:
    gamma_t: float
    lifetime_reference: float = 0.3  # seconds, documentation only

    def __post_init__(self):
        if not self.gamma_t >= 0 or not math.isfinite(self.gamma_t):
            raise ValueError(f"gamma_t must be finite and >= 0, got {self.gamma_t}")

    @property
    def eta(self) -> float:
        """Single-photon survival probability ``exp(-gamma_t)``."""
        return math.exp(-self.gamma_t)


class RandomSource:
    """Portable seeded stream of uniforms in [0, 1).

    Backed by ``numpy.random.Philox`` (Philox4x64-10, a counter-based
    generator) keyed by the 64-bit ``seed``; each uniform consumes one 64-bit
    output. ``offset`` skips that many uniforms, which is how a single shot of
    :func:`run_shots` is replayed in isolation (see :meth:`for_shot`).
    """

    def __init__(self, seed: int, offset: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.offset = int(offset)
        bitgen = np.random.Philox(key=self.seed)
        # four 64-bit outputs per counter block
        bitgen.advance(self.offset // 4)
        if self.offset % 4:
            bitgen.random_raw(self.offset % 4)
        self._gen = np.random.Generator(bitgen)

    @classmethod
    def for_shot(cls, seed: int, shot: int, draws_per_shot: int) -> RandomSource:
        """Stream for shot ``shot``: uniforms ``[shot * k, (shot + 1) * k)`` of the seed."""
        return cls(seed, shot * draws_per_shot)

    def uniform(self) -> float:
        return float(self._gen.random())

    def uniforms(self, shape) -> np.ndarray:
        return self._gen.random(shape)

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, offset={self.offset})"


# ------------------------------------------------------------- preparation

QuditSpec = tuple[Union[Basis, str], Union[int, Sequence[complex], np.ndarray]]


def _single(d, encoding, value):
    encoding = Basis(encoding)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if encoding is Basis.NUMBER:
            return make_number_state(d, int(value)).amplitudes, False
        if encoding is Basis.PHASE:
            return make_phase_state(d, int(value)).amplitudes, False
        raise ValueError("integer labels need encoding 'number' or 'phase'")
    vec = np.asarray(value, dtype=complex)
    if vec.shape != (d,):
        raise IndexOutOfRange(f"custom vector must have length {d}, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if not norm > 0 or not np.isfinite(norm):
        raise ZeroNorm("custom amplitude vector has zero (or non-finite) norm")
    renormalized = abs(norm - 1) > CUSTOM_NORM_TOL
    return vec / norm, renormalized


@dataclass(frozen=True, eq=False)
class Prepared:
    register: RegisterState
    renormalized: tuple[int, ...] = field(default=())


def init_register(d, specs: Sequence[QuditSpec], cap=None) -> RegisterState:
    """Tensor product of the requested single-qudit states.

    Each spec is ``(encoding, label)`` with an integer label in the number or
    phase basis, or ``(encoding, vector)`` with a custom amplitude vector. Custom
    vectors that are not unit-norm within 1e-8 are renormalized and the qudit
    index is logged as a warning; :func:`prepare` returns those indices.
    """
    return prepare(d, specs, cap).register


def prepare(d, specs: Sequence[QuditSpec], cap=None) -> Prepared:
    d = check_dim(d)
    specs = list(specs)
    if not specs:
        raise ValueError("a register needs at least one qudit")
    check_register_size(d, len(specs), cap)
    amps = np.ones(1, dtype=complex)
    encodings = []
    flagged = []
    for i, (encoding, value) in enumerate(specs):
        vec, renorm = _single(d, encoding, value)
        if renorm:
            log.warning("qudit %d: custom vector renormalized", i)
            flagged.append(i)
        amps = np.kron(amps, vec)
        encodings.append(Basis(encoding))
    return Prepared(RegisterState(d, amps, tuple(encodings)), tuple(flagged))


# ----------------------------------------------------------- gate dispatch

def _check_targets(reg: RegisterState, targets):
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise InvalidTargets(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < reg.m:
            raise InvalidTargets(f"target {t} outside register of {reg.m} qudits")
    return targets


def apply_matrix(reg: RegisterState, mat, targets, structure=Structure.GENERAL) -> RegisterState:
    """Apply a raw matrix without unitarity checks (used for Kraus operators)."""
    psi = np.ascontiguousarray(reg.amplitudes)
    if structure is Structure.DIAGONAL:
        out = kernels.apply_diagonal(psi, reg.d, reg.m, targets, np.ascontiguousarray(np.diagonal(mat)))
    else:
        out = kernels.apply_dense(psi, reg.d, reg.m, targets, np.ascontiguousarray(mat))
    return RegisterState(reg.d, out, reg.encodings)


def apply_gate(reg: RegisterState, op: Operator, targets, dense=False, check_unitary=True) -> RegisterState:
    """Apply ``op`` to the listed qudits (first target is the most significant).

    Diagonal and permutation operators take dedicated kernels unless
    ``dense=True`` forces the general matrix path.
    """
    targets = _check_targets(reg, targets)
    if op.arity != len(targets):
        raise ArityMismatch(f"operator acts on {op.arity} qudits, got {len(targets)} targets")
    if op.qudit_dim != reg.d:
        raise ArityMismatch(f"operator built for d={op.qudit_dim}, register has d={reg.d}")
    if check_unitary and op.unitarity_residual() > UNITARY_TOL:
        raise NotUnitary(f"operator is not unitary (residual {op.unitarity_residual():.3g})")
    psi = np.ascontiguousarray(reg.amplitudes)
    if dense or op.structure is Structure.GENERAL:
        out = kernels.apply_dense(psi, reg.d, reg.m, targets, op.matrix)
    elif op.structure is Structure.DIAGONAL:
        out = kernels.apply_diagonal(psi, reg.d, reg.m, targets, op.diagonal)
    else:
        perm, phases = op.permutation
        out = kernels.apply_permutation(psi, reg.d, reg.m, targets, perm, phases)
    return RegisterState(reg.d, out, reg.encodings)


def check_sum_encoding(reg, control, target) -> bool:
    """True iff the control is number-encoded and the target phase-encoded.

    ``reg`` may be a :class:`RegisterState` or any sequence of encodings.
    """
    encodings = reg.encodings if isinstance(reg, RegisterState) else tuple(Basis(e) for e in reg)
    return encodings[control] is Basis.NUMBER and encodings[target] is Basis.PHASE


# ------------------------------------------------------------- measurement

def outcome_probabilities(reg: RegisterState, qudit, basis=Basis.NUMBER) -> np.ndarray:
    basis = Basis(basis)
    if basis is Basis.PHASE:
        reg = apply_matrix(reg, fourier_matrix(reg.d).conj().T, (qudit,))
    return kernels.marginal_probs(np.ascontiguousarray(reg.amplitudes), reg.d, reg.m, qudit)


def _collapse(reg: RegisterState, qudit, basis, outcome) -> RegisterState:
    work = reg
    if basis is Basis.PHASE:
        work = apply_matrix(reg, fourier_matrix(reg.d).conj().T, (qudit,))
    t = work.tensor()
    out = np.zeros_like(t)
    idx = (slice(None),) * qudit + (outcome,)
    out[idx] = t[idx]
    amps = out.reshape(-1)
    collapsed = RegisterState(reg.d, amps / np.linalg.norm(amps), reg.encodings)
    if basis is Basis.PHASE:
        collapsed = apply_matrix(collapsed, fourier_matrix(reg.d), (qudit,))
    return collapsed


def measure(reg: RegisterState, qudit, basis, rng: RandomSource):
    """Projective measurement of one qudit; returns ``(record, collapsed)``.

    Phase-basis readout rotates the qudit with ``F^H``, samples in the number
    basis, collapses, and rotates back with ``F``.
    """
    (qudit,) = _check_targets(reg, (qudit,))
    basis = Basis(basis)
    if basis is Basis.GENERAL:
        raise ValueError("measurement basis must be 'number' or 'phase'")
    probs = outcome_probabilities(reg, qudit, basis)
    outcome = kernels.sample_index(probs, rng.uniform())
    p = float(probs[outcome] / probs.sum())
    return MeasurementRecord(qudit, basis, outcome, p), _collapse(reg, qudit, basis, outcome)


# -------------------------------------------------------------------- loss

def damping_kraus(d, lost, eta) -> np.ndarray:
    """Kraus operator for losing ``lost`` photons: ``|n> -> |n - lost>`` with
    amplitude ``sqrt(C(n, lost) (1 - eta)**lost eta**(n - lost))``."""
    k = np.zeros((d, d), dtype=complex)
    n = np.arange(lost, d)
    k[n - lost, n] = np.sqrt(comb(n, lost) * (1 - eta) ** lost * eta ** (n - lost))
    return k


def loss_weights(number_probs, eta) -> np.ndarray:
    """Born weights of losing 0..d-1 photons given the number distribution."""
    d = number_probs.shape[0]
    n = np.arange(d)
    w = np.zeros(d)
    for lost in range(d):
        tail = n[lost:]
        w[lost] = np.sum(number_probs[lost:] * comb(tail, lost) * (1 - eta) ** lost * eta ** (tail - lost))
    return w


def apply_loss(reg: RegisterState, qudit, loss: LossModel, rng: RandomSource) -> RegisterState:
    """One amplitude-damping trajectory step on ``qudit``.

    Always consumes exactly one uniform draw so streams stay aligned whether
    or not any loss occurs.
    """
    (qudit,) = _check_targets(reg, (qudit,))
    if not isinstance(loss, LossModel):
        loss = LossModel(float(loss))
    u = rng.uniform()
    if loss.gamma_t == 0:
        return reg
    eta = loss.eta
    probs = kernels.marginal_probs(np.ascontiguousarray(reg.amplitudes), reg.d, reg.m, qudit)
    weights = loss_weights(probs, eta)
    return _damp(reg, qudit, eta, kernels.sample_index(weights, u))


def _damp(reg, qudit, eta, lost):
    out = apply_matrix(reg, damping_kraus(reg.d, lost, eta), (qudit,))
    amps = out.amplitudes / np.linalg.norm(out.amplitudes)
    return RegisterState(reg.d, amps, reg.encodings)


# ---------------------------------------------------------------- programs

@dataclass(frozen=True)
class GateInstr:
    op: Operator
    targets: tuple[int, ...]
    label: str = ""


@dataclass(frozen=True)
class MeasureInstr:
    qudit: int
    basis: Basis
    label: str = ""


@dataclass(frozen=True)
class LossInstr:
    qudit: int
    loss: LossModel


Instruction = Union[GateInstr, MeasureInstr, LossInstr]


@dataclass(frozen=True, eq=False)
class Program:
    """Executable gate list: initial register plus instructions in order."""

    initial: RegisterState
    instructions: tuple[Instruction, ...]
    qudit_names: tuple[str, ...] = ()

    @property
    def measurements(self) -> tuple[MeasureInstr, ...]:
        return tuple(i for i in self.instructions if isinstance(i, MeasureInstr))


@dataclass
class ShotResult:
    shots: int
    seed: int
    histogram: Counter = field(default_factory=Counter)
    measurements: tuple[MeasureInstr, ...] = ()
    records: list | None = None

    def marginal(self, index: int) -> Counter:
        """Histogram of the ``index``-th measurement alone."""
        out: Counter = Counter()
        for key, count in self.histogram.items():
            out[key[index]] += count
        return out


def _stochastic_count(program: Program) -> int:
    return sum(not isinstance(i, GateInstr) for i in program.instructions)


def execute(program: Program, rng: RandomSource):
    """Run one shot step by step; returns ``(outcomes, final state)``.

    Every measurement and loss instruction draws exactly one uniform.
    """
    reg = program.initial
    outcomes = []
    for instr in program.instructions:
        if isinstance(instr, GateInstr):
            reg = apply_gate(reg, instr.op, instr.targets, check_unitary=False)
        elif isinstance(instr, MeasureInstr):
            rec, reg = measure(reg, instr.qudit, instr.basis, rng)
            outcomes.append(rec.outcome)
        else:
            reg = apply_loss(reg, instr.qudit, instr.loss, rng)
    return tuple(outcomes), reg


class _OutcomeTree:
    """Memoised branches of a program.

    The state after a stochastic instruction depends only on the branch
    indices chosen so far, so each node stores the next stochastic
    instruction, its branch weights, and the state it acts on.
    """

    def __init__(self, program: Program):
        self.program = program
        self.nodes = {}
        self.nodes[()] = self._settle(program.initial, 0)

    def _settle(self, reg, start):
        instrs = self.program.instructions
        j = start
        while j < len(instrs) and isinstance(instrs[j], GateInstr):
            reg = apply_gate(reg, instrs[j].op, instrs[j].targets, check_unitary=False)
            j += 1
        if j == len(instrs):
            return j, reg, None
        instr = instrs[j]
        psi = np.ascontiguousarray(reg.amplitudes)
        if isinstance(instr, MeasureInstr):
            work = reg
            if instr.basis is Basis.PHASE:
                work = apply_matrix(reg, fourier_matrix(reg.d).conj().T, (instr.qudit,))
            weights = kernels.marginal_probs(np.ascontiguousarray(work.amplitudes), reg.d, reg.m, instr.qudit)
        else:
            probs = kernels.marginal_probs(psi, reg.d, reg.m, instr.qudit)
            weights = loss_weights(probs, instr.loss.eta)
        return j, reg, weights

    def _branch(self, node, b):
        j, reg, _ = self.nodes[node]
        instr = self.program.instructions[j]
        if isinstance(instr, MeasureInstr):
            reg = _collapse(reg, instr.qudit, instr.basis, b)
        elif instr.loss.gamma_t > 0:
            reg = _damp(reg, instr.qudit, instr.loss.eta, b)
        return self._settle(reg, j + 1)

    def walk(self, uniforms):
        node = ()
        outcomes = []
        for u in uniforms:
            j, _, weights = self.nodes[node]
            if weights is None:
                break
            b = kernels.sample_index(weights, u)
            if isinstance(self.program.instructions[j], MeasureInstr):
                outcomes.append(b)
            child = node + (b,)
            if child not in self.nodes:
                self.nodes[child] = self._branch(node, b)
            node = child
        return tuple(outcomes)


def run_shots(program: Program, shots: int, seed: int, keep_records=False) -> ShotResult:
    """Sample ``shots`` independent executions of ``program``.

    Shot ``i`` draws its uniforms from ``RandomSource.for_shot(seed, i, k)``
    with ``k`` the number of measurement and loss instructions, so
    ``execute(program, RandomSource.for_shot(seed, i, k))`` replays it.
    Histogram keys are tuples of outcomes in program order; a program
    without measurements gives an empty histogram.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    result = ShotResult(shots=shots, seed=seed, measurements=program.measurements)
    tree = _OutcomeTree(program)
    k = _stochastic_count(program)
    if not program.measurements:
        return result
    draws = RandomSource(seed).uniforms((shots, k))
    records = []
    hist: Counter = Counter()
    for i in range(shots):
        outcomes = tree.walk(draws[i])
        hist[outcomes] += 1
        if keep_records:
            records.append(outcomes)
    result.histogram = hist
    if keep_records:
        result.records = records
    return result
