"""Polynomials in matrix entries: data model, parser and renderer.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := NUMBER | NUMBER "/" NUMBER | entry | "(" expr ")"
    entry  := ("g" | "gc") "[" INDEX "," INDEX "]"

``gc[i,j]`` is the complex conjugate of ``g[i,j]``.  Indices are integers and
may be negative (symplectic alphabet ``±1..±d``).  Products keep the written
order of factors, which fixes the order of the index lists I and J.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple


class Entry(NamedTuple):
    i: int
    j: int
    conj: bool = False

    def render(self) -> str:
        return f"{'gc' if self.conj else 'g'}[{self.i},{self.j}]"


Monomial = tuple  # tuple[Entry, ...] in written order
Polynomial = dict  # Monomial -> Fraction


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(gc|g)|(\d+)|(-)|([-+*^/()\[\],]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("name", m.group(1), start))
        elif m.group(2):
            tokens.append(("int", m.group(2), start))
        else:
            tokens.append(("op", m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _mul(a: Polynomial, b: Polynomial) -> Polynomial:
    out: Polynomial = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            key = ma + mb
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _add(a: Polynomial, b: Polynomial, sign: int = 1) -> Polynomial:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, 0) + sign * c
    return {k: v for k, v in out.items() if v}


class _Parser:
    def __init__(self, text: str, max_degree: int | None):
        self.tokens = _tokenize(text)
        self.k = 0
        self.max_degree = max_degree

    def peek(self):
        return self.tokens[self.k]

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.tokens[self.k]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2])
        self.k += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return out

    def expr(self) -> Polynomial:
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            sign = 1 if self.take()[1] == "+" else -1
            acc = _add(acc, self.term(), sign)
        return acc

    def term(self) -> Polynomial:
        acc = self.unary()
        while self.peek()[1] == "*":
            self.take("*")
            acc = _mul(acc, self.unary())
        return acc

    def unary(self) -> Polynomial:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take("-")
            return {m: -c for m, c in self.unary().items()}
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take("^")
            tok = self.take(kind="int")
            exp = int(tok[1])
            degree = max((len(m) for m in base), default=0) * exp
            if self.max_degree is not None and degree > self.max_degree:
                raise ParseError(f"degree {degree} exceeds limit {self.max_degree}", tok[2])
            out: Polynomial = {(): Fraction(1)}
            for _ in range(exp):
                out = _mul(out, base)
            return out
        return base

    def _index(self) -> int:
        sign = 1
        if self.peek()[1] == "-":
            self.take("-")
            sign = -1
        return sign * int(self.take(kind="int")[1])

    def atom(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            value = Fraction(int(tok[1]))
            if self.peek()[1] == "/":
                self.take("/")
                den = self.take(kind="int")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", den[2])
                value /= int(den[1])
            return {(): value} if value else {}
        if tok[0] == "name":
            self.take()
            self.take("[")
            i = self._index()
            self.take(",")
            j = self._index()
            self.take("]")
            return {(Entry(i, j, tok[1] == "gc"),): Fraction(1)}
        if tok[1] == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse_expression(text: str, max_degree: int | None = None) -> Polynomial:
    """Parse and expand ``text`` into ``{monomial: coefficient}``."""
    return _Parser(text, max_degree).parse()


def render_monomial(m: Iterable[Entry]) -> str:
    m = tuple(m)
    return "*".join(e.render() for e in m) if m else "1"


def render_expression(poly: Mapping) -> str:
    if not poly:
        return "0"
    parts = []
    for m, c in poly.items():
        c = Fraction(c)
        body = render_monomial(m)
        mag = abs(c)
        if body == "1":
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        parts.append(("-" if c < 0 else "+", text))
    sign, text = parts[0]
    out = ("-" if sign == "-" else "") + text
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out
