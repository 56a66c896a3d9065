"""Recursive-descent parser for the expression and form-literal grammars.

Expressions::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?            # integer exponents only
    atom   := INT | IDENT | FUNC '(' expr ')' | '(' expr ')'

Form literals use the same grammar; additionally ``d<coord>`` denotes the
basis 1-form of a coordinate and ``^`` between forms is the wedge product,
e.g. ``exp(x2)*dx1^dy1 + dx2^dy2``.
"""
from __future__ import annotations

import re
from typing import Iterable

from . import expr as E

FUNCTIONS = {"exp": E.exp, "ln": E.ln, "sin": E.sin, "cos": E.cos}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class UndeclaredVariable(ParseError):
    def __init__(self, name: str, offset: int, text: str = ""):
        ValueError.__init__(self, f"undeclared variable {name!r} at offset {offset}")
        self.name = name
        self.offset = offset
        self.text = text


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", m.group(1), start))
        elif m.group(2):
            tokens.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _names(chart) -> tuple[str, ...]:
    return tuple(getattr(chart, "coords", chart))


class _Parser:
    def __init__(self, text: str, names: Iterable[str], form_chart=None):
        self.text = text
        self.names = set(names)
        self.form_chart = form_chart
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value or tok[0] == "end":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {found}", tok[2], self.text)

    def error(self, tok, what="unexpected token"):
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"{what}: {found}", tok[2], self.text)

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.error(tok)
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            off = self.peek()[2]
            rhs = self.term()
            value = self._combine(value, rhs, op, off)
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            off = self.peek()[2]
            rhs = self.unary()
            value = self._combine(value, rhs, op, off)
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.next()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.next()
            off = self.peek()[2]
            if self.form_chart is not None and _is_form(base):
                rhs = self.power()
                if not _is_form(rhs):
                    raise ParseError("wedge of a form with a scalar", off, self.text)
                return base ^ rhs
            exponent = self.unary()
            if _is_form(exponent):
                raise ParseError("form used as an exponent", off, self.text)
            c = exponent.constant_value()
            if c is None or c.denominator != 1:
                raise ParseError("exponent must be an integer constant", off, self.text)
            try:
                return base ** int(c)
            except ZeroDivisionError:
                raise ParseError("negative power of zero", off, self.text) from None
        return base

    def atom(self):
        tok = self.next()
        kind, value, off = tok
        if kind == "int":
            return E.const(int(value))
        if kind == "ident":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                if _is_form(arg):
                    raise ParseError(f"{value}() applied to a form", off, self.text)
                try:
                    return FUNCTIONS[value](arg)
                except ValueError as exc:
                    raise ParseError(str(exc), off, self.text) from None
            if value in self.names:
                return E.var(value)
            if self.form_chart is not None and value.startswith("d") and value[1:] in self.names:
                from ..forms import DifferentialForm
                return DifferentialForm.basis(self.form_chart, value[1:])
            raise UndeclaredVariable(value, off, self.text)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        self.error(tok)

    def _combine(self, a, b, op, off):
        fa, fb = _is_form(a), _is_form(b)
        try:
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                if fa and fb:
                    raise ParseError("use ^ for the wedge product of forms", off, self.text)
                return a * b
            if fb:
                raise ParseError("division by a form", off, self.text)
            return a / b
        except ZeroDivisionError:
            raise ParseError("division by zero", off, self.text) from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), off, self.text) from None


def _is_form(x) -> bool:
    return not isinstance(x, E.Expr)


def parse(text: str, chart) -> E.Expr:
    """Parse ``text`` into a canonical expression over the coordinates of ``chart``
    (a :class:`~lcsreduce.forms.Chart` or any iterable of coordinate names)."""
    return _Parser(text, _names(chart)).parse()


def parse_form(text: str, chart, degree: int | None = None):
    """Parse a form literal on ``chart``; a scalar literal is a 0-form, and ``0``
    is the zero form of ``degree`` (default 0)."""
    from ..forms import DifferentialForm

    value = _Parser(text, _names(chart), form_chart=chart).parse()
    if isinstance(value, E.Expr):
        if value.is_zero_literal():
            return DifferentialForm.zero(chart, degree or 0)
        value = DifferentialForm.function(chart, value)
    if degree is not None and value.degree != degree and value.terms:
        raise ParseError(f"expected a {degree}-form, got degree {value.degree}", 0, text)
    if degree is not None and not value.terms:
        return DifferentialForm.zero(chart, degree)
    return value
