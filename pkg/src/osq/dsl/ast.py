"""Syntax tree for ``.osq`` circuit files.

Spans are carried on every node but excluded from equality, so a program
and its unparsed-then-reparsed copy compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Value = Union[float, complex, tuple]

GATE_NAMES = ("X", "Z", "F", "SUM", "D", "S", "KERR", "CUSTOM")


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_column: int | None = None

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Span

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"

    @property
    def is_error(self):
        return self.severity == "error"


@dataclass(frozen=True)
class Declaration:
    name: str
    encoding: str
    init: int | tuple[complex, ...]
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class GateStmt:
    gate: str
    params: tuple[tuple[str, Value], ...]
    operands: tuple[str, ...]
    span: Span = field(default=Span(0, 0), compare=False)

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class MeasureStmt:
    name: str
    basis: str
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class LossStmt:
    name: str
    gamma_t: float
    span: Span = field(default=Span(0, 0), compare=False)


Statement = Union[GateStmt, MeasureStmt, LossStmt]


@dataclass(frozen=True)
class CircuitAST:
    dim: int
    declarations: tuple[Declaration, ...]
    statements: tuple[Statement, ...]
    span: Span = field(default=Span(0, 0), compare=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.declarations)
