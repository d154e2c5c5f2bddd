"""Expression language for algebra elements.

Grammar (EBNF)::

    expr     = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
    term     = factor { ( "*" | "/" ) factor } ;
    factor   = ( "+" | "-" ) factor | power ;
    power    = postfix [ "^" [ "-" ] INTEGER ] ;
    postfix  = atom { "*" } ;            (* a "*" not followed by an operand is the involution *)
    atom     = NUMBER | NAME | "(" expr ")"
             | "[" expr "," expr "]"     (* supercommutator *)
             | "{" expr "," expr "}" ;   (* quantum Poisson bracket *)
    NUMBER   = digit { digit } [ "." digit { digit } ] ;
    NAME     = letter { letter | digit | "_" } ;

``NAME`` resolves to a generator, a formal parameter, ``i`` (imaginary unit) or
``I`` (the unit element).  Decimal literals are read exactly.  Division and
negative powers are only defined for invertible scalars (Laurent monomials).
A ``*`` is a binary product when the next token can start an operand and the
postfix involution otherwise, so ``A* * B`` means ``star(A) B``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from .algebra import AlgebraPresentation, NcPoly, quantum_pb, star, supercommutator
from .coefficient import Coefficient


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


class UnknownNameError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\]{},]))")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


_OPERAND_START = {"num", "name"}
_OPERAND_OPS = {"(", "[", "{"}


class _Parser:
    def __init__(self, text: str, pres: AlgebraPresentation):
        self.text = text
        self.p = pres
        self.toks = tokenize(text)
        self.k = 0

    def peek(self, offset: int = 0):
        return self.toks[min(self.k + offset, len(self.toks) - 1)]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {op!r}, found {found}", pos, self.text)

    def starts_operand(self, tok) -> bool:
        kind, val, _ = tok
        return kind in _OPERAND_START or (kind == "op" and val in _OPERAND_OPS)

    def parse(self) -> NcPoly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return e

    def expr(self) -> NcPoly:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            e = self.term()
            if val == "-":
                e = -e
        else:
            e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                e = e + t if val == "+" else e - t
            else:
                return e

    def term(self) -> NcPoly:
        e = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*" and self.starts_operand(self.peek(1)):
                self.take()
                e = e * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                _, _, dpos = self.peek()
                d = self.factor()
                if not d.is_scalar():
                    raise ParseError("division by a non-scalar expression", dpos, self.text)
                try:
                    e = e / d.constant()
                except ZeroDivisionError as exc:
                    raise ParseError(str(exc), dpos, self.text) from None
            else:
                return e

    def factor(self) -> NcPoly:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.factor()
            return -f if val == "-" else f
        return self.power()

    def power(self) -> NcPoly:
        base = self.postfix()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            neg = False
            if self.peek()[:2] == ("op", "-"):
                self.take()
                neg = True
            kind, val, epos = self.take()
            if kind != "num" or "." in val:
                raise ParseError("exponent must be an integer literal", epos, self.text)
            n = int(val)
            if neg:
                if not base.is_scalar():
                    raise ParseError("negative power of a non-scalar expression", epos, self.text)
                try:
                    return self.p.scalar(base.constant() ** (-n))
                except ZeroDivisionError as exc:
                    raise ParseError(str(exc), epos, self.text) from None
            return base ** n
        return base

    def postfix(self) -> NcPoly:
        e = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*" and not self.starts_operand(self.peek(1)):
                self.take()
                e = star(e)
            else:
                return e

    def atom(self) -> NcPoly:
        kind, val, pos = self.take()
        if kind == "num":
            return self.p.scalar(Fraction(val))
        if kind == "name":
            if val in self.p.index:
                return self.p.gen(val)
            if val in self.p.params:
                return self.p.param(val)
            if val == "i":
                return self.p.scalar(Coefficient.const(0, 1))
            if val == "I":
                return self.p.unit()
            raise UnknownNameError(f"unknown generator or parameter {val!r}", pos, self.text)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "op" and val in "[{":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]" if val == "[" else "}")
            return supercommutator(a, b) if val == "[" else quantum_pb(a, b)
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos, self.text)


def parse_expr(text: str, p: AlgebraPresentation) -> NcPoly:
    """Parse ``text`` over presentation ``p`` and return its normal form."""
    return _Parser(text, p).parse()
