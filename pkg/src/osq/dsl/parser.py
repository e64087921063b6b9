"""Line-oriented recursive-descent parser for ``.osq`` circuits.

Grammar (one statement per line, ``#`` starts a comment)::

    program   := header decl* stmt*
    header    := "dim" INT
    decl      := "qudit" IDENT "encoding=" ("number"|"phase") "init=" (INT | vector)
    vector    := "[" complex ("," complex)* "]"
    stmt      := gate | measure | loss
    gate      := "gate" GNAME params? IDENT IDENT?
    params    := "(" key "=" value ("," key "=" value)* ")"
    measure   := "measure" IDENT "basis=" ("number"|"phase")
    loss      := "loss" IDENT "gamma_t=" FLOAT
    complex   := FLOAT (("+"|"-") FLOAT "i")?

The two ``qudit`` keys may come in either order and a leading sign is
accepted on numbers. Gate names and arities are checked by the validator,
not here. :func:`parse` never raises: every problem becomes a
:class:`Diagnostic` and parsing resumes on the next line.
"""
from __future__ import annotations

import math
import re

from .ast import CircuitAST, Declaration, Diagnostic, GateStmt, LossStmt, MeasureStmt, Span

_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_PUNCT = "=(),[]+-"
_ENCODINGS = ("number", "phase")


class _SyntaxError(Exception):
    def __init__(self, message, column, end=None):
        super().__init__(message)
        self.column = column
        self.end = end


class _Token:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind, text, col):
        self.kind = kind  # WORD, INT, FLOAT, IMAG, EOL or a punctuation char
        self.text = text
        self.col = col

    @property
    def end(self):
        return self.col + len(self.text)


def _tokenize(line):
    tokens = []
    pos = 0
    n = len(line)
    while pos < n:
        ch = line[pos]
        if ch in " \t":
            pos += 1
            continue
        if ch == "#":
            break
        m = _WORD.match(line, pos)
        if m:
            tokens.append(_Token("WORD", m.group(), pos + 1))
            pos = m.end()
            continue
        m = _NUMBER.match(line, pos)
        if m:
            text = m.group()
            end = m.end()
            if end < n and line[end] == "i" and not (end + 1 < n and (line[end + 1].isalnum() or line[end + 1] == "_")):
                tokens.append(_Token("IMAG", text + "i", pos + 1))
                pos = end + 1
            else:
                kind = "INT" if text.isdigit() else "FLOAT"
                tokens.append(_Token(kind, text, pos + 1))
                pos = end
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, pos + 1))
            pos += 1
            continue
        raise _SyntaxError(f"unexpected character {ch!r}", pos + 1, pos + 2)
    tokens.append(_Token("EOL", "", len(line.rstrip()) + 1 if tokens else 1))
    return tokens


def _to_int(text, col):
    try:
        return int(text)
    except ValueError:
        raise _SyntaxError("integer literal too long", col) from None


class _LineParser:
    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        if tok.kind != "EOL":
            self.i += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.peek()
        if tok.kind != kind:
            got = "end of line" if tok.kind == "EOL" else repr(tok.text)
            raise _SyntaxError(f"expected {what or kind}, got {got}", tok.col, tok.end)
        return self.next()

    def expect_word(self, word):
        tok = self.peek()
        if tok.kind != "WORD" or tok.text != word:
            got = "end of line" if tok.kind == "EOL" else repr(tok.text)
            raise _SyntaxError(f"expected '{word}', got {got}", tok.col, tok.end)
        return self.next()

    def end(self):
        tok = self.peek()
        if tok.kind != "EOL":
            raise _SyntaxError(f"unexpected {tok.text!r} at end of statement", tok.col, tok.end)

    def span(self, tok):
        return Span(self.lineno, tok.col, tok.end)

    # values -------------------------------------------------------------
    def real(self):
        sign = 1.0
        if self.peek().kind in ("+", "-"):
            sign = -1.0 if self.next().kind == "-" else 1.0
        tok = self.peek()
        if tok.kind not in ("INT", "FLOAT"):
            got = "end of line" if tok.kind == "EOL" else repr(tok.text)
            raise _SyntaxError(f"expected a number, got {got}", tok.col, tok.end)
        self.next()
        return sign * float(tok.text)

    def complex_value(self):
        sign = 1.0
        if self.peek().kind in ("+", "-"):
            sign = -1.0 if self.next().kind == "-" else 1.0
        tok = self.peek()
        if tok.kind == "IMAG":
            self.next()
            return complex(0.0, sign * float(tok.text[:-1]))
        if tok.kind not in ("INT", "FLOAT"):
            got = "end of line" if tok.kind == "EOL" else repr(tok.text)
            raise _SyntaxError(f"expected a number, got {got}", tok.col, tok.end)
        self.next()
        re_part = sign * float(tok.text)
        if self.peek().kind in ("+", "-") and self.peek(1).kind == "IMAG":
            isign = -1.0 if self.next().kind == "-" else 1.0
            im = float(self.next().text[:-1])
            return complex(re_part, isign * im)
        return re_part

    def vector(self):
        self.expect("[", "'['")
        items = [complex(self.complex_value())]
        while self.peek().kind == ",":
            self.next()
            items.append(complex(self.complex_value()))
        self.expect("]", "',' or ']'")
        return tuple(items)

    def value(self):
        if self.peek().kind == "[":
            return self.vector()
        return self.complex_value()

    # statements ---------------------------------------------------------
    def header(self):
        self.expect_word("dim")
        tok = self.expect("INT", "an integer dimension")
        self.end()
        return _to_int(tok.text, tok.col)

    def declaration(self):
        first = self.expect_word("qudit")
        name = self.expect("WORD", "a qudit name").text
        found = {}
        while self.peek().kind == "WORD":
            key_tok = self.next()
            key = key_tok.text
            if key not in ("encoding", "init"):
                raise _SyntaxError(f"unknown qudit attribute {key!r}", key_tok.col, key_tok.end)
            if key in found:
                raise _SyntaxError(f"duplicate attribute {key!r}", key_tok.col, key_tok.end)
            self.expect("=", "'='")
            if key == "encoding":
                tok = self.expect("WORD", "'number' or 'phase'")
                if tok.text not in _ENCODINGS:
                    raise _SyntaxError(f"encoding must be 'number' or 'phase', got {tok.text!r}", tok.col, tok.end)
                found[key] = tok.text
            elif self.peek().kind == "[":
                found[key] = self.vector()
            else:
                neg = False
                if self.peek().kind == "-":
                    self.next()
                    neg = True
                tok = self.expect("INT", "an integer label or a vector")
                found[key] = -_to_int(tok.text, tok.col) if neg else _to_int(tok.text, tok.col)
        self.end()
        for key in ("encoding", "init"):
            if key not in found:
                tok = self.peek()
                raise _SyntaxError(f"qudit declaration is missing '{key}='", tok.col, tok.end)
        return Declaration(name, found["encoding"], found["init"], self.span(first))

    def gate(self):
        first = self.expect_word("gate")
        gname = self.expect("WORD", "a gate name").text
        params = []
        if self.peek().kind == "(":
            self.next()
            while True:
                key = self.expect("WORD", "a parameter name").text
                self.expect("=", "'='")
                params.append((key, self.value()))
                if self.peek().kind == ",":
                    self.next()
                    continue
                self.expect(")", "',' or ')'")
                break
        operands = [self.expect("WORD", "a qudit name").text]
        while self.peek().kind == "WORD":
            operands.append(self.next().text)
        self.end()
        return GateStmt(gname, tuple(params), tuple(operands), self.span(first))

    def measure(self):
        first = self.expect_word("measure")
        name = self.expect("WORD", "a qudit name").text
        self.expect_word("basis")
        self.expect("=", "'='")
        tok = self.expect("WORD", "'number' or 'phase'")
        if tok.text not in _ENCODINGS:
            raise _SyntaxError(f"basis must be 'number' or 'phase', got {tok.text!r}", tok.col, tok.end)
        self.end()
        return MeasureStmt(name, tok.text, self.span(first))

    def loss(self):
        first = self.expect_word("loss")
        name = self.expect("WORD", "a qudit name").text
        self.expect_word("gamma_t")
        self.expect("=", "'='")
        value = self.real()
        self.end()
        return LossStmt(name, value, self.span(first))


def _decode(source):
    if isinstance(source, str):
        return source, None
    data = bytes(source)
    try:
        return data.decode("utf-8"), None
    except UnicodeDecodeError as exc:
        head = data[: exc.start]
        line = head.count(b"\n") + 1
        col = exc.start - (head.rfind(b"\n") + 1) + 1
        return None, Diagnostic("error", "invalid UTF-8 byte sequence", Span(line, col, col + 1))


def parse(source):
    """Parse ``.osq`` source (``str`` or UTF-8 ``bytes``).

    Returns ``(ast, diagnostics)``; ``ast`` is ``None`` whenever an error
    diagnostic was produced.
    """
    text, bad = _decode(source)
    if bad is not None:
        return None, [bad]
    diags: list[Diagnostic] = []
    try:
        ast = _parse_text(text, diags)
    except RecursionError:  # pragma: no cover - the grammar is not recursive
        diags.append(Diagnostic("error", "input too deeply nested", Span(1, 1)))
        ast = None
    return (ast if not any(d.is_error for d in diags) else None), diags


def _parse_text(text, diags):
    dim = None
    header_span = None
    header_seen = False
    decls = []
    stmts = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        try:
            tokens = _tokenize(line)
        except _SyntaxError as exc:
            diags.append(Diagnostic("error", str(exc), Span(lineno, exc.column, exc.end)))
            continue
        head = tokens[0]
        if head.kind == "EOL":
            continue
        p = _LineParser(tokens, lineno)
        keyword = head.text if head.kind == "WORD" else None
        try:
            if keyword == "dim":
                if header_seen:
                    raise _SyntaxError("duplicate or misplaced dim header", head.col, head.end)
                header_seen = True
                dim = p.header()
                header_span = Span(lineno, head.col, head.end)
                continue
            if not header_seen:
                header_seen = True
                diags.append(Diagnostic("error", "missing dim header", Span(lineno, head.col, head.end)))
            if keyword == "qudit":
                decl = p.declaration()
                if stmts:
                    raise _SyntaxError("qudit declarations must precede statements", head.col, head.end)
                decls.append(decl)
            elif keyword == "gate":
                stmts.append(p.gate())
            elif keyword == "measure":
                stmts.append(p.measure())
            elif keyword == "loss":
                stmts.append(p.loss())
            else:
                raise _SyntaxError(f"unknown statement {head.text!r}", head.col, head.end)
        except _SyntaxError as exc:
            diags.append(Diagnostic("error", str(exc), Span(lineno, exc.column, exc.end)))
    if not header_seen:
        diags.append(Diagnostic("error", "missing dim header", Span(1, 1)))
    if dim is None:
        return None
    return CircuitAST(dim, tuple(decls), tuple(stmts), header_span)


# ------------------------------------------------------------------ unparse

def format_real(x: float) -> str:
    if math.isinf(x):
        return "-1e999" if x < 0 else "1e999"
    return repr(float(x))


def format_complex(z) -> str:
    if isinstance(z, complex):
        im = z.imag
        sign = "-" if math.copysign(1.0, im) < 0 else "+"
        return f"{format_real(z.real)}{sign}{format_real(abs(im))}i"
    return format_real(z)


def _format_value(v) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(format_complex(complex(z)) for z in v) + "]"
    return format_complex(v)


def unparse(ast: CircuitAST) -> str:
    """Canonical source text for ``ast``; reparses to an equal tree."""
    lines = [f"dim {ast.dim}"]
    for d in ast.declarations:
        init = str(d.init) if isinstance(d.init, int) else _format_value(d.init)
        lines.append(f"qudit {d.name} encoding={d.encoding} init={init}")
    for s in ast.statements:
        if isinstance(s, GateStmt):
            params = ""
            if s.params:
                params = "(" + ", ".join(f"{k}={_format_value(v)}" for k, v in s.params) + ")"
            lines.append(f"gate {s.gate}{params} {' '.join(s.operands)}")
        elif isinstance(s, MeasureStmt):
            lines.append(f"measure {s.name} basis={s.basis}")
        else:
            lines.append(f"loss {s.name} gamma_t={format_real(s.gamma_t)}")
    return "\n".join(lines) + "\n"
