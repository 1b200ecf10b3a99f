"""Recursive-descent parser for connection-spec expressions.

Grammar (UTF-8 input, identifiers ASCII):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom (('^' nonneg-int) | ('/' posint))*
    atom   := integer | 'i' | ident | deriv | '(' expr ')'
    deriv  := ('d'|'d2'|'d3'|...) '(' ident (',' coord)+ ')'

Integers are decimal digit runs; rationals arise from '/' which divides by a
positive integer only.  'i' is the imaginary unit and cannot be declared.
'd' and 'dN' directly followed by '(' are derivative markers; 'dN' requires
exactly N coordinate arguments.  Every other identifier must be declared in
the supplied symbol table.  Errors carry the byte offset into the input.
"""

from __future__ import annotations

import re as _re

from .errors import ParseError
from .poly import DiffPoly
from .rational import GaussianRational
from .symbols import COORDINATE, FUNCTION, Symbol, SymbolTable

_TOKEN = _re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^,]))")

_DERIV_MARKER = _re.compile(r"^d([0-9]*)$")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind  # "int" | "ident" | "op" | "end"
        self.text = text
        self.pos = pos  # character index into the source


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_pos = len(text) - len(stripped)
            raise ParseError(
                f"unexpected character {stripped[0]!r}", _byte_offset(text, bad_pos)
            )
        if m.group(1) is not None:
            tokens.append(_Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(_Token("ident", m.group(2), m.start(2)))
        else:
            tokens.append(_Token("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, table: SymbolTable):
        self.text = text
        self.table = table
        self.tokens = _tokenize(text)
        self.index = 0

    # -- token helpers -----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, _byte_offset(self.text, tok.pos))

    def expect_op(self, op):
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            self.error(f"expected {op!r}")
        return self.advance()

    # -- grammar -------------------------------------------------------------

    def parse(self) -> DiffPoly:
        value = self.expr()
        if self.peek().kind != "end":
            self.error("trailing input after expression")
        return value

    def expr(self) -> DiffPoly:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.advance()
            sign = -1 if tok.text == "-" else 1
        value = self.term() * sign
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.term()
                value = value - rhs if tok.text == "-" else value + rhs
            else:
                return value

    def term(self) -> DiffPoly:
        value = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.advance()
                value = value * self.factor()
            else:
                return value

    def factor(self) -> DiffPoly:
        value = self.atom()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "^":
                self.advance()
                exp_tok = self.peek()
                if exp_tok.kind != "int":
                    self.error("exponent must be a nonnegative integer")
                self.advance()
                value = value ** int(exp_tok.text)
            elif tok.kind == "op" and tok.text == "/":
                self.advance()
                div_tok = self.peek()
                if div_tok.kind != "int":
                    self.error("divisor must be a positive integer")
                self.advance()
                divisor = int(div_tok.text)
                if divisor == 0:
                    self.error("division by zero", div_tok)
                value = value / divisor
            else:
                return value

    def atom(self) -> DiffPoly:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return DiffPoly.constant(int(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            value = self.expr()
            self.expect_op(")")
            return value
        if tok.kind == "ident":
            if tok.text == "i":
                self.advance()
                return DiffPoly.constant(GaussianRational(0, 1))
            marker = _DERIV_MARKER.match(tok.text)
            nxt = self.tokens[self.index + 1]
            if marker and nxt.kind == "op" and nxt.text == "(":
                return self.derivative(marker)
            self.advance()
            sym = self.table.lookup(tok.text)
            if sym is None:
                self.error(f"undeclared identifier {tok.text!r}", tok)
            return DiffPoly.of(sym)
        self.error("expected a number, identifier or parenthesized expression")

    def derivative(self, marker) -> DiffPoly:
        head = self.advance()
        declared_order = int(marker.group(1)) if marker.group(1) else None
        self.expect_op("(")
        name_tok = self.peek()
        if name_tok.kind != "ident":
            self.error("expected a function name")
        self.advance()
        base = self.table.lookup(name_tok.text)
        if base is None:
            self.error(f"undeclared identifier {name_tok.text!r}", name_tok)
        if base.kind != FUNCTION:
            self.error(f"{name_tok.text!r} is not a function symbol", name_tok)
        coords = []
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == ",":
                self.advance()
                coord_tok = self.peek()
                if coord_tok.kind != "ident":
                    self.error("expected a coordinate name")
                self.advance()
                coord = self.table.lookup(coord_tok.text)
                if coord is None or coord.kind != COORDINATE:
                    self.error(
                        f"{coord_tok.text!r} is not a declared coordinate", coord_tok
                    )
                if coord.name not in base.depends_on:
                    self.error(
                        f"{base.name!r} does not depend on {coord.name!r}", coord_tok
                    )
                coords.append(coord.name)
            elif tok.kind == "op" and tok.text == ")":
                self.advance()
                break
            else:
                self.error("expected ',' or ')'")
        if not coords:
            self.error("derivative needs at least one coordinate", head)
        if declared_order is not None and declared_order != len(coords):
            self.error(
                f"marker {head.text!r} expects {declared_order} coordinates, got {len(coords)}",
                head,
            )
        index: dict[str, int] = {}
        for c in coords:
            index[c] = index.get(c, 0) + 1
        derived = Symbol(base.name, base.kind, base.depends_on, tuple(index.items()))
        return DiffPoly.of(derived)


def parse_expr(text: str, table: SymbolTable) -> DiffPoly:
    """Parse and canonicalize one expression against declared identifiers."""
    return _Parser(text, table).parse()


def parse_constant(text: str) -> GaussianRational:
    """Parse a constant of Q(i); rejects anything with free identifiers."""
    value = parse_expr(text, SymbolTable())
    return value.constant_value()
