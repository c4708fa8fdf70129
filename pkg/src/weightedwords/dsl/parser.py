"""Tokenizer and recursive-descent parser for the relation language.

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := INT | NAME | '-' exponent | '(' expr ')'
    atom     := INT | NAME | call | '(' expr ')'

Calls: poch, qbin, gseries, glimit, subst, sum, hseq, census.  ``subst``
and ``census`` separate their operand from the option list with ';'.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DSLSyntaxError
from .ast import (BinOp, Census, Expr, GLimit, GSeries, HSeq, Image, Int, Name, Neg, Poch, Pow,
                  QBin, Subst, Sum)

MARKERS = ("a", "b", "c")
CALLS = ("poch", "qbin", "gseries", "glimit", "subst", "sum", "hseq", "census")
HSEQ_ROUTES = ("recurrence", "determinant", "double_sum", "general", "prime", "prime_colored")

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>->|[-+*/^(),;=]))")


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(offset):
        line = max(i for i, s in enumerate(line_starts) if s <= offset)
        return line + 1, offset - line_starts[line] + 1

    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if not rest.strip():
                break
            skipped = len(rest) - len(rest.lstrip())
            line, col = where(pos + skipped)
            raise DSLSyntaxError(f"unexpected character {rest.lstrip()[0]!r}", line, col)
        kind = m.lastgroup
        line, col = where(m.start(kind))
        tokens.append(Token(kind, m.group(kind), line, col))
        pos = m.end()
    line, col = where(len(text))
    tokens.append(Token("eof", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, expected=()):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DSLSyntaxError(f"{message}, found {found}", t.line, t.col, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}", (repr(text),))

    def expect_name(self, what: str, choices=None) -> str:
        t = self.tok
        if t.kind != "name" or (choices and t.text not in choices):
            self.error(f"expected {what}", tuple(choices or (what,)))
        self.i += 1
        return t.text

    def expect_int(self, signed: bool = False) -> int:
        sign = -1 if signed and self.accept("-") else 1
        if self.tok.kind != "int":
            self.error("expected an integer", ("integer",))
        v = int(self.tok.text)
        self.i += 1
        return sign * v

    # -- grammar --
    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            self.error("unexpected token", ("operator", "end of input"))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            t = self.tok
            self.i += 1
            e = BinOp(t.text, e, self.term(), pos=(t.line, t.col))
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            t = self.tok
            self.i += 1
            e = BinOp(t.text, e, self.unary(), pos=(t.line, t.col))
        return e

    def unary(self) -> Expr:
        t = self.tok
        if self.accept("-"):
            return Neg(self.unary(), pos=(t.line, t.col))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        t = self.tok
        if self.accept("^"):
            return Pow(base, self.exponent(), pos=(t.line, t.col))
        return base

    def exponent(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Int(int(t.text), pos=(t.line, t.col))
        if t.kind == "name" and t.text not in CALLS:
            self.i += 1
            return Name(t.text, pos=(t.line, t.col))
        if self.accept("-"):
            return Neg(self.exponent(), pos=(t.line, t.col))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected an exponent", ("integer", "name", "'('", "'-'"))

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Int(int(t.text), pos=(t.line, t.col))
        if t.kind == "name":
            self.i += 1
            if t.text in CALLS:
                self.expect("(")
                node = getattr(self, "call_" + t.text)((t.line, t.col))
                self.expect(")")
                return node
            if self.tok.kind == "op" and self.tok.text == "(":
                raise DSLSyntaxError(f"unknown function {t.text!r}", t.line, t.col, CALLS)
            return Name(t.text, pos=(t.line, t.col))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected an expression", ("integer", "name", "'('", "'-'"))

    # -- calls --
    def call_poch(self, pos):
        base = self.expr()
        self.expect(",")
        step = self.expr()
        self.expect(",")
        if self.tok.kind == "name" and self.tok.text == "inf":
            self.i += 1
            count = None
        else:
            count = self.expr()
        inverse = False
        if self.accept(","):
            self.expect_name("'inv'", ("inv",))
            inverse = True
        return Poch(base, step, count, inverse, pos=pos)

    def call_qbin(self, pos):
        top = self.expr()
        self.expect(",")
        bottom = self.expr()
        step = Int(1)
        if self.accept(","):
            step = self.expr()
        return QBin(top, bottom, step, pos=pos)

    def call_gseries(self, pos):
        system = self.expect_name("a transition system name")
        self.expect(",")
        color = self.expect_name("a color")
        self.expect(",")
        return GSeries(system, color, self.expr(), pos=pos)

    def call_glimit(self, pos):
        return GLimit(self.expect_name("a transition system name"), pos=pos)

    def call_subst(self, pos):
        operand = self.expr()
        self.expect(";")
        images, q_power = {}, 1
        while True:
            t = self.tok
            target = self.expect_name("a marker or q", MARKERS + ("q",))
            self.expect("->")
            if target == "q":
                self.expect_name("'q'", ("q",))
                q_power = self.expect_int() if self.accept("^") else 1
                if q_power < 1:
                    raise DSLSyntaxError("q must map to a positive power of q", t.line, t.col)
            else:
                if target in images:
                    raise DSLSyntaxError(f"marker {target} mapped twice", t.line, t.col)
                images[target] = self.image()
            if not self.accept(","):
                break
        ordered = tuple((m, images[m]) for m in MARKERS if m in images)
        return Subst(operand, ordered, q_power, pos=pos)

    def image(self) -> Image:
        """0 | 1 | factor ('*' factor)*, factor = marker | q ('^' signed int)?"""
        if self.tok.kind == "int":
            v = self.expect_int()
            if v == 0:
                return Image(None, 0, zero=True)
            if v != 1:
                self.i -= 1
                self.error("a marker image must be 0, 1 or a monomial", ("0", "1", "marker", "q"))
            target, shift = None, 0
            if not self.accept("*"):
                return Image(None, 0)
        else:
            target, shift = None, 0
        while True:
            name = self.expect_name("a marker or q", MARKERS + ("q",))
            if name == "q":
                shift += self.expect_int(signed=True) if self.accept("^") else 1
            elif target is None:
                target = name
            else:
                self.i -= 1
                self.error("a marker image holds at most one marker", ("q",))
            if not self.accept("*"):
                return Image(target, shift)

    def call_sum(self, pos):
        index = self.expect_name("an index name")
        self.expect(",")
        lower = self.expr()
        self.expect(",")
        if self.tok.kind == "name" and self.tok.text == "auto":
            self.i += 1
            upper = None
        else:
            upper = self.expr()
        self.expect(",")
        return Sum(index, lower, upper, self.expr(), pos=pos)

    def call_hseq(self, pos):
        route = self.expect_name("an h-sequence route", HSEQ_ROUTES)
        self.expect(",")
        return HSeq(route, self.expr(), pos=pos)

    def call_census(self, pos):
        family = self.expect_name("a partition family")
        markers = []
        if self.accept(";"):
            while True:
                m = self.expect_name("a marker", MARKERS)
                self.expect("=")
                markers.append((m, self.expect_name("a part statistic")))
                if not self.accept(","):
                    break
        return Census(family, tuple(markers), pos=pos)


def parse(text: str) -> Expr:
    return Parser(text).parse()
