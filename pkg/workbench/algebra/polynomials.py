"""Multivariate polynomials over QQ on top of sympy's sparse rings."""

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from operator import itemgetter
from typing import Dict, Iterable, List, Sequence, Tuple

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import ProductOrder, grevlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from workbench.core.errors import WorkbenchError

Polynomial = PolyElement


@dataclass(frozen=True)
class TermOrder:
    """degrevlex, lex, or a two-block order eliminating the first `split` variables"""

    kind: str = "degrevlex"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise WorkbenchError(f"unknown term order {self.kind!r}")

    def monomial_order(self):
        if self.kind == "lex":
            return lex
        if self.kind == "block":
            return _block_order(self.split)
        return grevlex

    def __str__(self) -> str:
        return f"block({self.split})" if self.kind == "block" else self.kind


DEGREVLEX = TermOrder("degrevlex")
LEX = TermOrder("lex")


def block(split: int) -> TermOrder:
    return TermOrder("block", split)


@lru_cache(maxsize=None)
def _block_order(split: int) -> ProductOrder:
    # one cached instance per split so rings built with it compare equal
    return ProductOrder(
        (grevlex, itemgetter(slice(None, split))),
        (grevlex, itemgetter(slice(split, None))),
    )


@lru_cache(maxsize=None)
def polynomial_ring(variables: Tuple[str, ...], order: TermOrder = DEGREVLEX) -> PolyRing:
    return PolyRing(tuple(Symbol(v) for v in variables), QQ, order.monomial_order())


def variable_names(ring: PolyRing) -> Tuple[str, ...]:
    return tuple(str(s) for s in ring.symbols)


def with_order(ring: PolyRing, order: TermOrder) -> PolyRing:
    return polynomial_ring(variable_names(ring), order)


def fresh_name(base: str, taken: Iterable[str]) -> str:
    """base, base1, base2, ... avoiding every name in taken"""
    taken = set(taken)
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def embed(f: Polynomial, ring: PolyRing, positions: Sequence[int]) -> Polynomial:
    """Move f into ring, sending variable i of f.ring to variable positions[i]"""
    n = ring.ngens
    terms = {}
    for monom, coeff in f.terms():
        exps = [0] * n
        for i, e in enumerate(monom):
            if e:
                exps[positions[i]] += e
        terms[tuple(exps)] = coeff
    return ring.from_dict(terms)


def transport(f: Polynomial, ring: PolyRing) -> Polynomial:
    """Move f into a ring by variable name; every variable f uses must exist there"""
    if f.ring == ring:
        return f
    target = {name: i for i, name in enumerate(variable_names(ring))}
    positions = []
    used = set()
    for monom, _ in f.terms():
        used.update(i for i, e in enumerate(monom) if e)
    for i, name in enumerate(variable_names(f.ring)):
        if name in target:
            positions.append(target[name])
        elif i in used:
            raise WorkbenchError(f"variable {name!r} is not available in the target ring")
        else:
            positions.append(-1)
    return embed(f, ring, positions)


def uses_only(f: Polynomial, allowed: Iterable[int]) -> bool:
    allowed = set(allowed)
    return all(
        all(e == 0 or i in allowed for i, e in enumerate(monom)) for monom in f.monoms()
    )


def evaluate(f: Polynomial, images: Sequence, one) -> object:
    """Substitute images[i] for variable i; images live in any commutative algebra"""
    result = one * 0
    powers: Dict[Tuple[int, int], object] = {}
    for monom, coeff in f.terms():
        term = one * coeff
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        result = result + term
    return result


def substitute(f: Polynomial, images: Sequence[Polynomial], ring: PolyRing) -> Polynomial:
    return evaluate(f, images, ring.one)


def constant(ring: PolyRing, value) -> Polynomial:
    if isinstance(value, Fraction):
        value = QQ(value.numerator, value.denominator)
    return ring.ground_new(value)


def to_fraction(coeff) -> Fraction:
    return Fraction(int(QQ.numer(coeff)), int(QQ.denom(coeff)))


def format_coefficient(coeff) -> str:
    value = coeff if isinstance(coeff, Fraction) else to_fraction(coeff)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_polynomial(f: Polynomial) -> str:
    """Canonical text in the parser syntax: `3/4*x^2*y - z + 1`"""
    if not f:
        return "0"
    names = variable_names(f.ring)
    pieces: List[str] = []
    for monom, coeff in f.terms():
        value = to_fraction(coeff)
        sign = "-" if value < 0 else "+"
        magnitude = abs(value)
        factors = [
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e
        ]
        if magnitude != 1 or not factors:
            factors.insert(0, format_coefficient(magnitude))
        body = "*".join(factors)
        if not pieces:
            pieces.append(f"-{body}" if sign == "-" else body)
        else:
            pieces.append(f"{sign} {body}")
    return " ".join(pieces)


class Ideal:
    """An ideal of QQ[ring.gens] given by nonzero generators; Groebner bases cached per order"""

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial] = ()):
        self.ring = ring
        self.generators: Tuple[Polynomial, ...] = tuple(
            g for g in (transport(g, ring) for g in generators) if g
        )
        self._bases: Dict[TermOrder, List[Polynomial]] = {}

    @property
    def variables(self) -> Tuple[str, ...]:
        return variable_names(self.ring)

    def __repr__(self) -> str:
        return f"Ideal({[format_polynomial(g) for g in self.generators]})"

    def __add__(self, other) -> "Ideal":
        extra = other.generators if isinstance(other, Ideal) else tuple(other)
        return Ideal(self.ring, self.generators + tuple(transport(g, self.ring) for g in extra))

    def groebner_basis(self, order: TermOrder = DEGREVLEX) -> List[Polynomial]:
        if order not in self._bases:
            from workbench.algebra.groebner import buchberger

            self._bases[order] = buchberger(self, order)
        return self._bases[order]

    def reduce(self, f: Polynomial) -> Polynomial:
        from workbench.algebra.groebner import normal_form

        reduced = normal_form(transport(f, self.ring), self.groebner_basis(), DEGREVLEX)
        return transport(reduced, self.ring)

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)

    def is_unit(self) -> bool:
        basis = self.groebner_basis()
        return len(basis) == 1 and basis[0].is_ground and bool(basis[0])

    def is_zero(self) -> bool:
        return not self.generators

    def key(self) -> Tuple[str, ...]:
        """Canonical identity: the reduced degrevlex basis as text"""
        return tuple(sorted(format_polynomial(g) for g in self.groebner_basis()))

    def same_as(self, other: "Ideal") -> bool:
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )
