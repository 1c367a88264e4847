"""Morphisms of ringed posets: a monotone map plus a comap at every source point."""

from typing import Dict, List, Optional, Sequence

import structlog

from workbench.algebra.posets import Element, MonotoneMap, check_monotone, minimum
from workbench.algebra.rings import PresentedRing, RingMap, compose_maps, identity, prime_preimage
from workbench.core.errors import (
    AffinenessUnverifiableError,
    ConstructionError,
    FunctorialityError,
    InvalidPrimeError,
    WorkbenchError,
)
from workbench.geometry.spaces import PrimePoint, RingedSpace, centre_point
from workbench.models.reports import Qualifier, Report

logger = structlog.get_logger(__name__)


class SchematicMorphism:
    """f: X -> Y with comaps O_{Y,f(x)} -> O_{X,x}"""

    def __init__(
        self,
        source: RingedSpace,
        target: RingedSpace,
        mapping: Dict[Element, Element],
        comaps: Dict[Element, RingMap],
        name: str = "f",
    ):
        self.name = name
        self.source = source
        self.target = target
        self.map = MonotoneMap(source.poset, target.poset, mapping)
        if not check_monotone(self.map):
            raise ConstructionError(f"{name} is not monotone")
        self.comaps: Dict[Element, RingMap] = {}
        for x in source:
            if x not in comaps:
                raise ConstructionError(f"{name} has no comap at {x}")
            comap = comaps[x]
            if comap.source.variables != target.stalk(self.map(x)).variables or (
                comap.target.variables != source.stalk(x).variables
            ):
                raise ConstructionError(f"comap of {name} at {x} does not match the stalks")
            self.comaps[x] = comap

    def __repr__(self) -> str:
        return f"SchematicMorphism({self.name}: {self.source.name} -> {self.target.name})"

    def __call__(self, x: Element) -> Element:
        return self.map(x)

    def comap(self, x: Element) -> RingMap:
        return self.comaps[x]

    def square_problems(self) -> List[str]:
        """Covers x < x' whose square r_X o comap_x = comap_x' o r_Y fails"""
        problems = []
        X, Y = self.source, self.target
        for x, x2 in X.edges():
            y, y2 = self(x), self(x2)
            left = X.cover_map(x, x2)
            right = Y.restriction(y, y2)
            A = X.stalk(x2)
            for v in Y.stalk(y).variables:
                gen = Y.stalk(y).gens[v]
                if not A.equal(left(self.comap(x)(gen)), self.comap(x2)(right(gen))):
                    problems.append(f"square at {x} -> {x2} fails on {v}")
                    break
        return problems

    def check(self) -> "SchematicMorphism":
        problems = self.square_problems()
        if problems:
            raise FunctorialityError(problems[0], {"problems": problems})
        return self

    def compose(self, after: "SchematicMorphism") -> "SchematicMorphism":
        """after o self"""
        if after.source is not self.target and after.source.elements != self.target.elements:
            raise ConstructionError("morphisms are not composable")
        mapping = {x: after(self(x)) for x in self.source}
        comaps = {x: compose_maps([after.comap(self(x)), self.comap(x)]) for x in self.source}
        return SchematicMorphism(
            self.source, after.target, mapping, comaps, name=f"{after.name}.{self.name}"
        )

    @classmethod
    def identity(cls, X: RingedSpace) -> "SchematicMorphism":
        return cls(X, X, {x: x for x in X}, {x: identity(X.stalk(x)) for x in X}, name="id")

    def fiber(self, y: Element) -> List[Element]:
        """f^{-1}(U_y)"""
        return self.map.fiber_up_set(y)


def open_immersion(X: RingedSpace, x: Element) -> SchematicMorphism:
    """U_x -> X with identity comaps"""
    U = X.open_subspace(x)
    return SchematicMorphism(
        U, X, {u: u for u in U}, {u: identity(U.stalk(u)) for u in U}, name=f"U_{x}"
    )


def to_point(X: RingedSpace, point: RingedSpace) -> SchematicMorphism:
    """The structure morphism to a one-point space over QQ"""
    (pt,) = point.elements
    base = point.stalk(pt)
    if base.variables:
        raise ConstructionError("the base point must be Spec(QQ)")
    comaps = {x: RingMap(base, X.stalk(x), [], check=False) for x in X}
    return SchematicMorphism(X, point, {x: pt for x in X}, comaps, name=f"{X.name}->pt")


def is_affine(X: RingedSpace) -> bool:
    """Minimum-element criterion"""
    return minimum(X.poset, X.elements) is not None


def global_sections(X: RingedSpace) -> PresentedRing:
    m = minimum(X.poset, X.elements)
    if m is None:
        raise AffinenessUnverifiableError(
            f"{X.name} has no minimum; global sections are not available"
        )
    return X.stalk(m)


def affine_report(X: RingedSpace) -> Report:
    m = minimum(X.poset, X.elements)
    report = Report(command="affine", subject=X.name, verdict=m is not None)
    report.qualify(Qualifier.CRITERION)
    if m is None:
        report.lines.append("no minimum element; affineness is unverifiable by the criterion")
        report.add_row(minimum=None)
    else:
        report.lines.append(f"minimum {m}; global sections {X.stalk(m)!r}")
        report.add_row(minimum=m)
    return report


def fiber_minimum(f: SchematicMorphism, y: Element) -> Optional[Element]:
    """Minimum of f^{-1}(U_y), None when the preimage is empty"""
    fiber = f.fiber(y)
    if not fiber:
        return None
    m = minimum(f.source.poset, fiber)
    if m is None:
        raise AffinenessUnverifiableError(
            f"preimage of U_{y} has no minimum", {"element": str(y), "fiber": [str(x) for x in fiber]}
        )
    return m


def is_affine_morphism(f: SchematicMorphism) -> Report:
    report = Report(command="affine-morphism", subject=f.name).qualify(Qualifier.CRITERION)
    ok = True
    for y in f.target:
        fiber = f.fiber(y)
        m = minimum(f.source.poset, fiber) if fiber else None
        holds = not fiber or m is not None
        ok &= holds
        report.add_row(y=y, fiber=len(fiber), minimum=m, holds=holds)
        if not holds:
            report.lines.append(f"preimage of U_{y} has no minimum")
    report.verdict = ok
    return report


def check_central(f: SchematicMorphism, tests: Sequence[PrimePoint]) -> Report:
    """Sampled test that f sends centres to centres"""
    report = Report(command="central", subject=f.name).qualify(
        Qualifier.SAMPLED, Qualifier.ASSERTED_PRIME
    )
    ok = True
    for point in tests:
        label = point.describe(f.source)
        try:
            c = centre_point(f.source, point)
            y = f(c.carrier)
            transported = prime_preimage(f.comap(c.carrier), c.prime)
            d = centre_point(f.target, PrimePoint(y, transported))
        except InvalidPrimeError:
            report.add_row(point=label, status="skipped")
            report.lines.append(f"{label}: transported ideal is not proper, skipped")
            continue
        holds = d.carrier == y
        ok &= holds
        report.add_row(point=label, centre=c.carrier, image=y, target_centre=d.carrier, holds=holds)
        if not holds:
            report.lines.append(f"{label}: f(centre) = {y} but the target centre is {d.carrier}")
    report.verdict = ok
    logger.info("centrality sampled", morphism=f.name, points=len(tests), central=ok)
    return report

