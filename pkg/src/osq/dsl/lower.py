"""Lowering of checked circuits to engine programs."""
from __future__ import annotations

from functools import lru_cache

from .. import gates
from ..engine import GateInstr, LossInstr, LossModel, MeasureInstr, Program, prepare
from ..hilbert import Basis, Operator, fourier_operator
from ..operators import pauli_generators
from .ast import GateStmt, MeasureStmt
from .validate import CheckedCircuit, custom_matrix

SUM_MODES = ("kerr", "permutation")


@lru_cache(maxsize=None)
def _pauli(d):
    return pauli_generators(d)


@lru_cache(maxsize=None)
def _fourier(d):
    return fourier_operator(d)


@lru_cache(maxsize=None)
def _fourier_dagger(d):
    return _fourier(d).dagger()


def _single_gate(stmt: GateStmt, d) -> Operator:
    name = stmt.gate
    if name == "X":
        return _pauli(d)[0]
    if name == "Z":
        return _pauli(d)[1]
    if name == "F":
        return _fourier(d)
    if name == "D":
        return gates.displacement(d, complex(stmt.param("alpha")))
    if name == "S":
        return gates.squeeze(d, complex(stmt.param("zeta")))
    if name == "KERR":
        return gates.kerr(d, complex(stmt.param("kappa_t")).real)
    if name == "CUSTOM":
        return Operator(custom_matrix(stmt.param("u"), d))
    raise ValueError(f"not a single-qudit gate: {name}")


def lower(checked: CheckedCircuit, sum_mode="kerr", cap=None) -> Program:
    """Build the executable program for a validated circuit.

    SUM lowers to the cross-Kerr gate at the lattice-aligned coupling
    (``sum_mode="kerr"``). With ``sum_mode="permutation"`` it lowers to the
    label permutation conjugated into the target's phase encoding,
    ``F_t . SUM_perm . F_t^H``, which acts identically on every register.
    Raises :class:`~osq.errors.ResourceCapExceeded` for oversize registers.
    """
    if sum_mode not in SUM_MODES:
        raise ValueError(f"sum_mode must be one of {SUM_MODES}")
    ast = checked.ast
    d = ast.dim
    specs = [(decl.encoding, decl.init if isinstance(decl.init, int) else list(decl.init))
             for decl in ast.declarations]
    initial = prepare(d, specs, cap).register
    idx = checked.index
    instrs = []
    for stmt in ast.statements:
        if isinstance(stmt, GateStmt):
            targets = tuple(idx[n] for n in stmt.operands)
            if stmt.gate != "SUM":
                instrs.append(GateInstr(_single_gate(stmt, d), targets, stmt.gate))
            elif sum_mode == "kerr":
                instrs.append(GateInstr(gates.sum_via_kerr(d), targets, "SUM"))
            else:
                instrs.append(GateInstr(_fourier_dagger(d), targets[1:], "F^H"))
                instrs.append(GateInstr(gates.sum_permutation(d), targets, "SUM"))
                instrs.append(GateInstr(_fourier(d), targets[1:], "F"))
        elif isinstance(stmt, MeasureStmt):
            instrs.append(MeasureInstr(idx[stmt.name], Basis(stmt.basis), stmt.name))
        else:
            instrs.append(LossInstr(idx[stmt.name], LossModel(stmt.gamma_t)))
    return Program(initial, tuple(instrs), ast.names)
