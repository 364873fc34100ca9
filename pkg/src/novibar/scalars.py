"""Exact truncated arithmetic in the mod-2 universal Novikov field.

A scalar is a finite formal sum of monomials T^e with rational exponents
and coefficients in the two-element field, so it is stored as the set of
exponents that are present; addition is symmetric difference and repeated
exponents cancel eagerly.  Every scalar carries a precision bound: terms
at exponents >= the bound are unknown and are truncated away.  Exponents
are exact `fractions.Fraction` values throughout; the only floats ever
used are +/-inf sentinels.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import FormatError, NotAUnit, ValuationOrder

INFINITY: float = math.inf
NEG_INFINITY: float = -math.inf

#: Exact rational exponent, or an infinite sentinel where noted.
Exponent = Union[Fraction, float]

_RAT_RE = re.compile(r"^-?\d+(/\d+)?$")


def as_exponent(value: object) -> Exponent:
    """Coerce ints, strings like "3/2", Fractions, and +/-inf to an Exponent."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise FormatError(f"not an exponent: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value):
            return value
        raise FormatError(f"floating-point exponent rejected: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if text in ("inf", "+inf", "infinity"):
            return INFINITY
        if text in ("-inf", "-infinity"):
            return NEG_INFINITY
        if not _RAT_RE.match(text):
            raise FormatError(f"not a rational literal: {value!r}")
        return Fraction(text)
    raise FormatError(f"not an exponent: {value!r}")


def format_exponent(value: Exponent) -> str:
    """Serialize an exponent as an exact string ("3/2", "-1", "inf")."""
    if value == INFINITY:
        return "inf"
    if value == NEG_INFINITY:
        return "-inf"
    return str(value)


def _parity_terms(exponents: Iterable[Fraction]) -> frozenset[Fraction]:
    seen: set[Fraction] = set()
    for e in exponents:
        if e in seen:
            seen.discard(e)
        else:
            seen.add(e)
    return frozenset(seen)


@dataclass(frozen=True)
class NovikovScalar:
    """A truncated element of the universal Novikov field over F_2.

    `terms` is the set of exponents with coefficient 1; every member is
    strictly below `precision`.  The zero scalar is the empty set and is
    normally carried at infinite precision, but truncated zeros with a
    finite bound are legal and mean "no terms below the bound".
    """

    terms: frozenset[Fraction]
    precision: Exponent = INFINITY

    def __post_init__(self) -> None:
        for e in self.terms:
            if not isinstance(e, Fraction):
                raise TypeError(f"term exponent must be a Fraction: {e!r}")
            if e >= self.precision:
                raise ValueError(f"term T^{e} at or above precision {self.precision}")

    @staticmethod
    def of(*exponents: object, precision: object = INFINITY) -> "NovikovScalar":
        prec = as_exponent(precision)
        terms = _parity_terms(
            e for e in (as_exponent(x) for x in exponents) if e < prec
        )
        return NovikovScalar(terms, prec)

    @staticmethod
    def zero() -> "NovikovScalar":
        return _ZERO

    @staticmethod
    def one() -> "NovikovScalar":
        return _ONE

    @staticmethod
    def monomial(exponent: object) -> "NovikovScalar":
        return NovikovScalar(frozenset((Fraction(as_exponent(exponent)),)))

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Exponent:
        """Minimal exponent present; +inf for (truncated) zero."""
        if not self.terms:
            return INFINITY
        return min(self.terms)

    def truncate(self, precision: object) -> "NovikovScalar":
        prec = min(self.precision, as_exponent(precision))
        return NovikovScalar(frozenset(e for e in self.terms if e < prec), prec)

    def shift(self, exponent: object) -> "NovikovScalar":
        """Multiply by the monomial T^exponent (exact)."""
        c = as_exponent(exponent)
        if c == 0:
            return self
        if not self.terms and self.precision == INFINITY:
            return self
        return NovikovScalar(
            frozenset(e + c for e in self.terms),
            self.precision if self.precision == INFINITY else self.precision + c,
        )

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        prec = min(self.precision, other.precision)
        terms = frozenset(
            e for e in self.terms.symmetric_difference(other.terms) if e < prec
        )
        return NovikovScalar(terms, prec)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        if not self.terms or not other.terms:
            # Exact annihilation: 0 * x = 0 regardless of either precision.
            return _ZERO
        prec = min(
            self.precision + other.valuation(), other.precision + self.valuation()
        )
        parity: set[Fraction] = set()
        for a in self.terms:
            for b in other.terms:
                e = a + b
                if e >= prec:
                    continue
                if e in parity:
                    parity.discard(e)
                else:
                    parity.add(e)
        return NovikovScalar(frozenset(parity), prec)

    def __str__(self) -> str:
        return format_scalar(self)


_ZERO = NovikovScalar(frozenset())
_ONE = NovikovScalar(frozenset((Fraction(0),)))


def add(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x + y


def mul(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x * y


def invert_unit(x: NovikovScalar, precision: object | None = None) -> NovikovScalar:
    """Invert a unit of the valuation ring by a truncated geometric series.

    Requires valuation zero.  Writing x = 1 + u with v(u) > 0 the inverse
    is sum(u^k); the char-2 Newton step y <- y + y*e, e <- e^2 squares the
    residual each round, so finitely many rounds reach any finite bound.
    A finite working precision is needed whenever u != 0: it is taken
    from the scalar itself or from the `precision` argument.
    """
    if x.valuation() != 0:
        raise NotAUnit(f"valuation {x.valuation()} != 0")
    u = x + _ONE
    prec = x.precision
    if precision is not None:
        prec = min(prec, as_exponent(precision))
    if u.is_zero():
        return _ONE.truncate(prec) if prec != INFINITY else _ONE
    if prec == INFINITY:
        raise ValueError(
            "invert_unit needs a finite precision for a non-monomial unit"
        )
    y = _ONE.truncate(prec)
    e = u.truncate(prec)
    while not e.is_zero():
        y = y + (y * e).truncate(prec)
        e = (e * e).truncate(prec)
    return y


def divide_in_ring(
    x: NovikovScalar, pivot: NovikovScalar, precision: object | None = None
) -> NovikovScalar:
    """Return q with x = q * pivot up to precision; needs v(x) >= v(pivot)."""
    if pivot.is_zero():
        raise ValuationOrder("division by zero pivot")
    if x.is_zero():
        return _ZERO.truncate(min(x.precision, pivot.precision))
    v = pivot.valuation()
    if x.valuation() < v:
        raise ValuationOrder(f"valuation {x.valuation()} below pivot valuation {v}")
    unit = pivot.shift(-v)
    if unit == _ONE:
        return x.shift(-v)
    inv = invert_unit(unit, precision=precision)
    return (x * inv).shift(-v)


_TERM_RE = re.compile(r"^T\^(?:\{(-?\d+(?:/\d+)?)\}|(-?\d+(?:/\d+)?))$")


def parse_scalar(text: str, precision: object = INFINITY) -> NovikovScalar:
    """Parse the textual form "T^0 + T^{3/2}"; "0" is the empty sum."""
    body = text.strip()
    if body == "0":
        return _ZERO.truncate(as_exponent(precision))
    exponents = []
    for raw in body.split("+"):
        token = raw.strip()
        if token == "1":
            exponents.append(Fraction(0))
            continue
        m = _TERM_RE.match(token)
        if not m:
            raise FormatError(f"bad scalar term: {token!r}")
        exponents.append(Fraction(m.group(1) or m.group(2)))
    return NovikovScalar.of(*exponents, precision=precision)


def format_scalar(x: NovikovScalar) -> str:
    if not x.terms:
        return "0"
    parts = []
    for e in sorted(x.terms):
        if e.denominator == 1:
            parts.append(f"T^{e.numerator}")
        else:
            parts.append("T^{%s}" % e)
    return " + ".join(parts)
