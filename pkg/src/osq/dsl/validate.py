"""Semantic checks on a parsed circuit.

Everything is checked in one pass and every violation is reported; the
first error does not stop validation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..engine import check_sum_encoding
from .ast import GATE_NAMES, CircuitAST, Diagnostic, GateStmt, LossStmt, MeasureStmt

# gate -> (arity, {param: kind}); kind is "complex", "real" or "matrix"
GATE_SIGNATURES = {
    "X": (1, {}),
    "Z": (1, {}),
    "F": (1, {}),
    "SUM": (2, {}),
    "D": (1, {"alpha": "complex"}),
    "S": (1, {"zeta": "complex"}),
    "KERR": (1, {"kappa_t": "real"}),
    "CUSTOM": (1, {"u": "matrix"}),
}

CUSTOM_UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class CheckedCircuit:
    ast: CircuitAST
    index: dict
    warnings: tuple[Diagnostic, ...] = ()

    @property
    def dim(self):
        return self.ast.dim

    @property
    def encodings(self):
        return tuple(d.encoding for d in self.ast.declarations)


def custom_matrix(values, d) -> np.ndarray:
    """Row-major ``d x d`` matrix from a flat literal."""
    return np.asarray(values, dtype=complex).reshape(d, d)


def validate(ast: CircuitAST):
    """Return ``(checked, diagnostics)``; ``checked`` is ``None`` on any error."""
    diags: list[Diagnostic] = []

    def error(msg, span):
        diags.append(Diagnostic("error", msg, span))

    d = ast.dim
    if d < 1:
        error(f"dimension must be at least 1, got {d}", ast.span)

    index = {}
    for decl in ast.declarations:
        if decl.name in index:
            error(f"qudit {decl.name!r} declared twice", decl.span)
            continue
        index[decl.name] = len(index)
        if isinstance(decl.init, int):
            if d >= 1 and not 0 <= decl.init < d:
                error(f"label out of range [0,{d})", decl.span)
        else:
            vec = np.asarray(decl.init, dtype=complex)
            if d >= 1 and vec.shape[0] != d:
                error(f"init vector has {vec.shape[0]} entries, expected {d}", decl.span)
            elif not np.all(np.isfinite(vec)):
                error("init vector entries must be finite", decl.span)
            else:
                norm = float(np.linalg.norm(vec))
                if norm == 0:
                    error("init vector has zero norm", decl.span)
                elif abs(norm - 1) > 1e-8:
                    diags.append(Diagnostic("warning", f"init vector has norm {norm:.6g}; it will be renormalized",
                                            decl.span))
    decl_by_name = {decl.name: decl for decl in ast.declarations}

    for stmt in ast.statements:
        if isinstance(stmt, GateStmt):
            _check_gate(stmt, d, index, decl_by_name, error)
        elif isinstance(stmt, MeasureStmt):
            if stmt.name not in index:
                error(f"undeclared qudit {stmt.name!r}", stmt.span)
        elif isinstance(stmt, LossStmt):
            if stmt.name not in index:
                error(f"undeclared qudit {stmt.name!r}", stmt.span)
            if not (math.isfinite(stmt.gamma_t) and stmt.gamma_t >= 0):
                error(f"gamma_t must be finite and non-negative, got {stmt.gamma_t}", stmt.span)

    if not ast.declarations:
        error("circuit declares no qudits", ast.span)

    if any(x.is_error for x in diags):
        return None, diags
    return CheckedCircuit(ast, index, tuple(diags)), diags


def _check_gate(stmt, d, index, decl_by_name, error):
    if stmt.gate not in GATE_SIGNATURES:
        error(f"unknown gate {stmt.gate!r}; expected one of {', '.join(GATE_NAMES)}", stmt.span)
        return
    arity, signature = GATE_SIGNATURES[stmt.gate]
    if len(stmt.operands) != arity:
        error(f"gate {stmt.gate} takes {arity} operand(s), got {len(stmt.operands)}", stmt.span)
    for name in stmt.operands:
        if name not in index:
            error(f"undeclared qudit {name!r}", stmt.span)
    if len(set(stmt.operands)) != len(stmt.operands):
        error(f"gate {stmt.gate} operands must be distinct", stmt.span)

    keys = [k for k, _ in stmt.params]
    for k in sorted(set(keys)):
        if keys.count(k) > 1:
            error(f"parameter {k!r} given more than once", stmt.span)
    for k in keys:
        if k not in signature:
            error(f"gate {stmt.gate} has no parameter {k!r}", stmt.span)
    for k, kind in signature.items():
        if k not in keys:
            error(f"gate {stmt.gate} requires parameter {k!r}", stmt.span)
            continue
        value = stmt.param(k)
        if kind == "matrix":
            if not isinstance(value, tuple):
                error(f"parameter {k!r} must be a vector literal of {d * d} entries", stmt.span)
            elif len(value) != d * d:
                error(f"parameter {k!r} needs {d * d} entries (row-major {d}x{d}), got {len(value)}", stmt.span)
            elif not np.all(np.isfinite(value)):
                error(f"parameter {k!r} entries must be finite", stmt.span)
            else:
                u = custom_matrix(value, d)
                res = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
                if res > CUSTOM_UNITARY_TOL:
                    error(f"CUSTOM matrix is not unitary (residual {res:.3g})", stmt.span)
        elif isinstance(value, tuple):
            error(f"parameter {k!r} must be a scalar", stmt.span)
        elif not np.isfinite(value):
            error(f"parameter {k!r} must be finite", stmt.span)
        elif kind == "real" and isinstance(value, complex) and value.imag != 0:
            error(f"parameter {k!r} must be real", stmt.span)

    if stmt.gate == "SUM" and len(stmt.operands) == 2 and all(n in index for n in stmt.operands):
        control, target = stmt.operands
        encodings = [decl_by_name[n].encoding for n in index]
        if not check_sum_encoding(encodings, index[control], index[target]):
            for name, want, role in ((control, "number", "control"), (target, "phase", "target")):
                decl = decl_by_name[name]
                if decl.encoding != want:
                    error(
                        f"SUM at line {stmt.span.line}: the {role} qudit {name!r} must be encoded in the "
                        f"{want} basis (control in number basis, target in phase basis), "
                        f"but it is declared encoding={decl.encoding}",
                        decl.span,
                    )
