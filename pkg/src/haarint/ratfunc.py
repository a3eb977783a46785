"""Exact rational functions in one symbol ``d`` with integer coefficients.

Polynomials are tuples of ints in ascending degree order.  A
:class:`RationalFunction` is always stored reduced: numerator and denominator
are coprime as polynomials, the joint integer content is 1, and the
denominator has a positive leading coefficient.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Sequence

Poly = tuple  # tuple[int, ...], ascending coefficients


def _trim(coeffs: Sequence) -> list:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_add(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def poly_neg(a: Sequence) -> list:
    return [-c for c in a]


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Division over the rationals; coefficients come back as Fractions."""
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in _trim(a)]
    lead = Fraction(b[-1])
    if len(rem) < len(b):
        return [], rem
    quot = [Fraction(0)] * (len(rem) - len(b) + 1)
    for shift in range(len(rem) - len(b), -1, -1):
        coef = rem[shift + len(b) - 1] / lead
        quot[shift] = coef
        if coef:
            for i, c in enumerate(b):
                rem[shift + i] -= coef * c
    return _trim(quot), _trim(rem[: len(b) - 1])


def _primitive(coeffs: Sequence) -> list[int]:
    """Scale a rational polynomial to coprime integer coefficients, lc > 0."""
    coeffs = [Fraction(c) for c in _trim(coeffs)]
    if not coeffs:
        return []
    den = reduce(lcm, (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, ints)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def poly_gcd(a: Sequence, b: Sequence) -> list[int]:
    """Primitive integer gcd of two polynomials (positive leading coefficient)."""
    a, b = _primitive(a), _primitive(b)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, _primitive(r)
    return a


def poly_eval(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _exact_quotient(a: Sequence, b: Sequence) -> list[Fraction]:
    q, r = poly_divmod(a, b)
    assert not r, "inexact polynomial division"
    return q


class RationalFunction:
    """Reduced ratio ``num(d) / den(d)`` of integer polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence = (), den: Sequence = (1,)):
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = (), (1,)
            return
        g = poly_gcd(num, den)
        if len(g) > 1:
            num, den = _exact_quotient(num, g), _exact_quotient(den, g)
        # clear rational coefficients jointly
        num = [Fraction(c) for c in num]
        den = [Fraction(c) for c in den]
        scale = reduce(lcm, (c.denominator for c in num + den), 1)
        num = [int(c * scale) for c in num]
        den = [int(c * scale) for c in den]
        content = reduce(gcd, num + den)
        if den[-1] < 0:
            content = -content
        self.num = tuple(c // content for c in num)
        self.den = tuple(c // content for c in den)

    @classmethod
    def symbol(cls) -> "RationalFunction":
        return cls((0, 1))

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        value = Fraction(value)
        return cls((value.numerator,), (value.denominator,))

    @classmethod
    def from_poly(cls, coeffs: Sequence) -> "RationalFunction":
        """Polynomial with (possibly rational) ascending coefficients."""
        coeffs = [Fraction(c) for c in coeffs]
        scale = reduce(lcm, (c.denominator for c in coeffs), 1)
        return cls([int(c * scale) for c in coeffs], (scale,))

    @staticmethod
    def coerce(value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, (int, Rational)):
            return RationalFunction.constant(value)
        raise TypeError(f"cannot convert {value!r} to RationalFunction")

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on d")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    def __add__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(poly_add(self.num, other.num), self.den)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return RationalFunction(num, poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(poly_neg(self.num), self.den)

    def __sub__(self, other):
        try:
            return self + (-RationalFunction.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunction(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction.constant(1) / (self ** (-k))
        out = RationalFunction.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return poly_mul(self.num, other.den) == poly_mul(other.num, self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        """Evaluate at a number; exact for ints and Fractions."""
        if isinstance(x, (int, Rational)):
            x = Fraction(x)
        den = poly_eval(self.den, x)
        if den == 0:
            raise ZeroDivisionError(f"pole at d = {x}")
        return poly_eval(self.num, x) / den

    def __repr__(self):
        return f"RationalFunction({self.num}, {self.den})"

    def __str__(self):
        return render(self)


d = RationalFunction.symbol()
ZERO = RationalFunction()
ONE = RationalFunction.constant(1)


def render_poly(coeffs: Sequence[int], var: str = "d") -> str:
    """Descending powers with explicit signs, e.g. ``d^2 + 3*d - 2``."""
    terms = []
    for k, c in reversed(list(enumerate(coeffs))):
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            power = var if k == 1 else f"{var}^{k}"
            body = power if mag == 1 else f"{mag}*{power}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _linear_factors(coeffs: Sequence[int]) -> tuple[int, list[tuple[int, int]]] | None:
    """Split an integer polynomial into ``content * prod(a*d + b)``.

    Returns None unless the polynomial splits completely over the rationals.
    """
    import sympy

    x = sympy.Symbol("d")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    content, factors = poly.factor_list()
    linear = []
    for factor, mult in factors:
        if factor.degree() != 1:
            return None
        a, b = (int(c) for c in factor.all_coeffs())
        if a < 0:
            a, b = -a, -b
            content = -content if mult % 2 else content
        linear.extend([(a, b)] * mult)
    linear.sort(key=lambda ab: (ab[1] != 0, Fraction(ab[1], ab[0])))
    return int(content), linear


def _render_linear(a: int, b: int) -> str:
    head = "d" if a == 1 else f"{a}*d"
    if b == 0:
        return head
    return f"({head} {'+' if b > 0 else '-'} {abs(b)})"


def render(f: RationalFunction) -> str:
    num = render_poly(f.num)
    if f.den == (1,):
        return num
    if len(f.num) > 1 and num.count(" ") > 0:
        num = f"({num})"
    if len(f.den) == 1:
        return f"{num}/{f.den[0]}"
    split = _linear_factors(f.den)
    if split is None:
        den = f"({render_poly(f.den)})"
    else:
        content, linear = split
        pieces = [_render_linear(a, b) for a, b in linear]
        if content != 1:
            pieces.insert(0, str(content))
        den = pieces[0] if len(pieces) == 1 else "(" + "*".join(pieces) + ")"
    return f"{num}/{den}"
