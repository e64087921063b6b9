"""Circuit language: parse, validate, lower."""
from .ast import CircuitAST, Declaration, Diagnostic, GateStmt, LossStmt, MeasureStmt, Span
from .lower import SUM_MODES, lower
from .parser import parse, unparse
from .validate import CheckedCircuit, validate


def compile_source(source, sum_mode="kerr", cap=None):
    """Parse, validate and lower in one go; returns ``(program, diagnostics)``."""
    ast, diags = parse(source)
    if ast is None:
        return None, diags
    checked, vdiags = validate(ast)
    diags = diags + vdiags
    if checked is None:
        return None, diags
    return lower(checked, sum_mode, cap), diags


__all__ = [
    "CheckedCircuit",
    "CircuitAST",
    "Declaration",
    "Diagnostic",
    "GateStmt",
    "LossStmt",
    "MeasureStmt",
    "SUM_MODES",
    "Span",
    "compile_source",
    "lower",
    "parse",
    "unparse",
    "validate",
]
