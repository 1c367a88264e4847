"""Rational functions in one variable t over QQ, the fraction field of QQ[t]_(t)."""

import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField, field

from workbench.algebra.polynomials import (
    Polynomial,
    format_polynomial,
    polynomial_ring,
    to_fraction,
)
from workbench.core.errors import WorkbenchError

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def fraction_field() -> FracField:
    K, _ = field("t", QQ)
    return K


def t_ring():
    return polynomial_ring(("t",))


def _order(p: Polynomial) -> int:
    return min(m[0] for m in p.monoms())


class RationalFunction:
    """An element of QQ(t); numerator and denominator are coprime, the denominator monic"""

    __slots__ = ("element",)

    def __init__(self, element: FracElement):
        self.element = element

    @classmethod
    def from_polynomials(cls, numerator: Polynomial, denominator: Polynomial) -> "RationalFunction":
        if not denominator:
            raise WorkbenchError("rational function with zero denominator")
        K = fraction_field()
        num = K.ring.from_dict(dict(numerator.terms()))
        den = K.ring.from_dict(dict(denominator.terms()))
        return cls(K.new(num, den))

    @classmethod
    def constant(cls, value: Scalar) -> "RationalFunction":
        return cls(_coerce(value))

    @classmethod
    def t(cls) -> "RationalFunction":
        return cls(fraction_field().gens[0])

    @property
    def numerator(self) -> Polynomial:
        num, den = self._canonical()
        return num

    @property
    def denominator(self) -> Polynomial:
        num, den = self._canonical()
        return den

    def _canonical(self):
        ring = t_ring()
        num = ring.from_dict(dict(self.element.numer.terms()))
        den = ring.from_dict(dict(self.element.denom.terms()))
        lead = den.LC
        return num.quo_ground(lead), den.quo_ground(lead)

    def is_zero(self) -> bool:
        return not self.element

    def valuation(self) -> Union[int, float]:
        """ord_t(numerator) - ord_t(denominator); +inf for zero"""
        if self.is_zero():
            return math.inf
        num, den = self._canonical()
        return _order(num) - _order(den)

    def value_at_zero(self) -> Fraction:
        """Residue modulo t of an element of QQ[t]_(t)"""
        v = self.valuation()
        if v < 0:
            raise WorkbenchError(f"{self} has a pole at t = 0")
        if v > 0:
            return Fraction(0)
        num, den = self._canonical()
        k = _order(den)
        a = to_fraction(dict(num.terms()).get((k,), QQ.zero))
        b = to_fraction(dict(den.terms()).get((k,), QQ.zero))
        return a / b

    def __add__(self, other) -> "RationalFunction":
        return RationalFunction(self.element + _coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.element)

    def __sub__(self, other) -> "RationalFunction":
        return RationalFunction(self.element - _coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction(_coerce(other) - self.element)

    def __mul__(self, other) -> "RationalFunction":
        return RationalFunction(self.element * _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        divisor = _coerce(other)
        if not divisor:
            raise WorkbenchError("division by zero in QQ(t)")
        return RationalFunction(self.element / divisor)

    def __pow__(self, exponent: int) -> "RationalFunction":
        if exponent < 0 and self.is_zero():
            raise WorkbenchError("division by zero in QQ(t)")
        return RationalFunction(self.element**exponent)

    def __eq__(self, other) -> bool:
        try:
            diff = self.element - _coerce(other)
        except (TypeError, WorkbenchError):
            return NotImplemented
        return not diff

    def __hash__(self) -> int:
        return hash(str(self))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __str__(self) -> str:
        num, den = self._canonical()
        if den == den.ring.one:
            return format_polynomial(num)
        numerator = format_polynomial(num)
        if len(num.terms()) > 1:
            numerator = f"({numerator})"
        return f"{numerator}/({format_polynomial(den)})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def _coerce(value) -> FracElement:
    K = fraction_field()
    if isinstance(value, RationalFunction):
        return value.element
    if isinstance(value, FracElement):
        return value
    if isinstance(value, Fraction):
        return K(QQ(value.numerator, value.denominator))
    if isinstance(value, bool):
        raise WorkbenchError("booleans are not field elements")
    return K(value)


def valuation(r: RationalFunction) -> Union[int, float]:
    return r.valuation()


def random_rational_function(rng: random.Random, degree: int = 4, bound: int = 5) -> RationalFunction:
    """Random nonzero element of QQ(t) with numerator and denominator of degree <= degree"""
    ring = t_ring()
    t = ring.gens[0]

    def poly():
        d = rng.randint(0, degree)
        return sum((rng.randint(-bound, bound) * t**i for i in range(d + 1)), ring.zero)

    numerator = poly()
    while not numerator:
        numerator = poly()
    denominator = poly()
    while not denominator:
        denominator = poly()
    return RationalFunction.from_polynomials(numerator, denominator)
