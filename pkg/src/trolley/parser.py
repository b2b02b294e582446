"""Recursive-descent parser for the concrete formula syntax.

Grammar (``->`` is right-associative; ``!`` binds tightest)::

    formula := impl
    impl    := or ("->" impl)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | atom
    atom    := ident | "true" | "false" | "(" formula ")" | dilemma
    dilemma := "[" agents ":" formula ("," formula)* "@" sac "]"
             | "[[" agents ":" formula ("," formula)* "@" sac "]]"
    agents  := ident ("," ident)*
    sac     := entry ("," entry)*
    entry   := (ident | "*") ":" rational
    rational:= ["-"] digits ["/" digits]
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    And,
    Bottom,
    FormulaError,
    FormulaSet,
    Implies,
    Neg,
    Or,
    Prop,
    SacrificeMap,
    Strict,
    Top,
    Weak,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<rational>-?\d+(?:/\d+)?(?![\w.]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<lbb>\[\[)
  | (?P<rbb>\]\])
  | (?P<op>[!&|()\[\]:,@*])
  | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)

KEYWORDS = {"true", "false"}


class ParseError(FormulaError):
    def __init__(self, msg, line, col):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        value = m.group()
        col = m.start() - line_start + 1
        if kind == "bad":
            if value in "-./" or value.isdigit():
                raise ParseError(f"malformed rational near {value!r}", line, col)
            raise ParseError(f"unexpected character {value!r}", line, col)
        if kind != "ws":
            if kind == "op":
                kind = value
            elif kind == "arrow":
                kind = "->"
            elif kind == "lbb":
                kind = "[["
            elif kind == "rbb":
                kind = "]]"
            tokens.append(Token(kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = m.start() + value.rfind("\n") + 1
    end_col = len(text) - line_start + 1
    tokens.append(Token("eof", "", line, end_col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def take(self, kind):
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        self.i += 1
        return tok

    def accept(self, kind):
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def formula(self):
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.accept("!"):
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "true":
                return Top()
            if tok.text == "false":
                return Bottom()
            return Prop(tok.text)
        if self.accept("("):
            f = self.formula()
            self.take(")")
            return f
        if tok.kind in ("[", "[["):
            return self.dilemma()
        found = tok.text or "end of input"
        raise self.error(f"expected a formula, found {found!r}")

    def ident(self, what):
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def dilemma(self):
        opener = self.tok
        weak = opener.kind == "[["
        self.i += 1
        if self.tok.kind == ":":
            raise self.error("coalition must be nonempty")
        agents = [self.ident("agent name")]
        while self.accept(","):
            agents.append(self.ident("agent name"))
        self.take(":")
        if self.tok.kind == "@":
            raise self.error("dilemma member list must be nonempty")
        members = [self.formula()]
        while self.accept(","):
            members.append(self.formula())
        self.take("@")
        sacrifice = self.sacrifice()
        self.take("]]" if weak else "]")
        node = Weak if weak else Strict
        return node(frozenset(agents), FormulaSet(members), sacrifice)

    def sacrifice(self):
        bounds, wildcard = {}, None
        while True:
            tok = self.tok
            if tok.kind == "*":
                self.i += 1
                key = "*"
            else:
                key = self.ident("agent name or '*'")
            self.take(":")
            value = self.rational()
            if key == "*":
                if wildcard is not None:
                    raise self.error("duplicate wildcard sacrifice entry", tok)
                wildcard = value
            else:
                if key in bounds:
                    raise self.error(f"duplicate sacrifice entry for {key!r}", tok)
                bounds[key] = value
            if not self.accept(","):
                break
        return SacrificeMap.of(bounds, wildcard)

    def rational(self):
        tok = self.tok
        if tok.kind != "rational":
            raise self.error(f"sacrifice value must be a rational, found {tok.text or 'end of input'!r}")
        self.i += 1
        num, _, den = tok.text.partition("/")
        if den and int(den) == 0:
            raise self.error("zero denominator", tok)
        return Fraction(int(num), int(den) if den else 1)


def parse_formula(text: str):
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return f


def parse_rational(text: str) -> Fraction:
    """Parse ``"n"`` or ``"n/d"`` (optionally negative) into a Fraction."""
    m = re.fullmatch(r"\s*(-?\d+)(?:/(\d+))?\s*", str(text))
    if not m or (m.group(2) is not None and int(m.group(2)) == 0):
        raise ValueError(f"malformed rational {text!r}")
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def parse_sacrifice(text: str) -> SacrificeMap:
    """Parse a bare sacrifice list such as ``"m_a:2, m_b:2"`` or ``"*:1"``."""
    p = _Parser(text)
    s = p.sacrifice()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after sacrifice")
    return s


def parse_formula_list(text: str) -> list:
    """Comma-separated formulas, e.g. an explorer pool ``"d1, d2, d3 | d4"``."""
    p = _Parser(text)
    out = [p.formula()]
    while p.accept(","):
        out.append(p.formula())
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return out
