"""Property testers: closed immersions, separatedness, valuative criteria over
QQ[t]_(t), and the pro-local finite-presentation covering criterion.

Valuative verdicts are sampled over a finite suite of points with values in
QQ(t); they never amount to a proof.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import structlog

from workbench.algebra.polynomials import evaluate
from workbench.algebra.posets import Element, MonotoneMap
from workbench.algebra.ratfunc import RationalFunction
from workbench.algebra.rings import RingMap, compose_maps, ideal_key, is_surjective
from workbench.core.concurrency import parallel_map
from workbench.core.errors import (
    AffinenessUnverifiableError,
    CertificateRequiredError,
    RingMapError,
    WorkbenchError,
)
from workbench.geometry.builders import build_dvr_space, build_point
from workbench.geometry.constructions import (
    FlatImmersionFamily,
    diagonal,
    identity_family,
    is_covering,
    open_cover_family,
    wide_fibered_product,
)
from workbench.geometry.morphisms import SchematicMorphism, fiber_minimum, is_affine, to_point
from workbench.geometry.spaces import PrimePoint, RingedSpace, centre_point
from workbench.models.reports import Qualifier, Report

logger = structlog.get_logger(__name__)

Images = Dict[str, RationalFunction]


@dataclass
class BasePoint:
    """An A-point of the base: a carrier of Y and images in QQ[t]_(t)"""

    carrier: Element
    images: Images = field(default_factory=dict)


@dataclass
class SigmaPoint:
    """A QQ(t)-point of X: a carrier and the images of its stalk's variables"""

    carrier: Element
    images: Images
    base: Optional[BasePoint] = None
    label: str = ""

    def check(self, X: RingedSpace) -> "SigmaPoint":
        A = X.stalk(self.carrier)
        missing = [v for v in A.variables if v not in self.images]
        if missing:
            raise RingMapError(f"sigma point at {self.carrier} has no image for {missing}")
        for rel in A.relations.generators:
            if not _value(rel, A.variables, self.images).is_zero():
                raise RingMapError(
                    f"sigma point at {self.carrier} violates a relation of its stalk",
                    {"relation": A.format(rel)},
                )
        return self

    def describe(self) -> str:
        if self.label:
            return self.label
        body = ", ".join(f"{v} -> {r}" for v, r in self.images.items())
        return f"{self.carrier}: {body}"


def _one() -> RationalFunction:
    return RationalFunction.constant(1)


def _value(f, variables: Sequence[str], images: Images) -> RationalFunction:
    return evaluate(f, [images[v] for v in variables], _one())


def pull_back(phi: RingMap, images: Images) -> Images:
    """Images of phi.source's variables under (target -> QQ(t)) o phi"""
    return {
        v: _value(img, phi.target.variables, images)
        for v, img in zip(phi.source.variables, phi.images)
    }


def ascend(X: RingedSpace, sigma: SigmaPoint) -> Tuple[Element, Images]:
    """Move sigma up along covers whose witness does not vanish; returns the top carrier"""
    x, images = sigma.carrier, dict(sigma.images)
    moved = True
    while moved:
        moved = False
        for t in X.poset.upper_covers(x):
            r = X.cover_map(x, t)
            if r.certificate is None:
                raise CertificateRequiredError(f"restriction {x} -> {t} is not certified")
            s = _value(r.certificate.witness, r.source.variables, images)
            if s.is_zero():
                continue
            new_images = {}
            for v in r.target.variables:
                p, k = r.certificate.sections[v]
                new_images[v] = _value(p, r.source.variables, images) * s ** (-k)
            x, images, moved = t, new_images, True
            break
    return x, images


def _closed_point(X: RingedSpace, x: Element, images: Images) -> PrimePoint:
    A = X.stalk(x)
    gens = [A.gens[v] - images[v].value_at_zero() for v in A.variables]
    return PrimePoint(x, A.ideal(gens))


def _base_square_commutes(
    f: SchematicMorphism, x: Element, images: Images, base: BasePoint
) -> bool:
    Y = f.target
    if not Y.poset.le(base.carrier, f(x)):
        return False
    phi = compose_maps([Y.restriction(base.carrier, f(x)), f.comap(x)])
    pulled = pull_back(phi, images)
    return all(pulled[v] == base.images[v] for v in Y.stalk(base.carrier).variables)


@dataclass
class Lift:
    """A QQ[t]_(t)-point: the two points of the DVR space sent into X"""

    carrier: Element
    closed_point: PrimePoint
    points: MonotoneMap
    centre: Optional[Element] = None


def v_lifts(
    X: RingedSpace, sigma: SigmaPoint, f: Optional[SchematicMorphism] = None
) -> List[Lift]:
    """Lifts of sigma to QQ[t]_(t)-points, one per point of Spec(X)"""
    sigma.check(X)
    top, images = ascend(X, sigma)
    dvr = build_dvr_space()
    raw: List[Lift] = []
    for x0 in X.poset.down_set(top):
        pulled = pull_back(X.restriction(x0, top), images)
        if any(r.valuation() < 0 for r in pulled.values()):
            continue
        if f is not None and sigma.base is not None:
            if not _base_square_commutes(f, x0, pulled, sigma.base):
                continue
        points = MonotoneMap(dvr.poset, X.poset, {"closed": x0, "generic": top})
        raw.append(Lift(x0, _closed_point(X, x0, pulled), points))

    classes: Dict[Tuple, Lift] = {}
    for lift in raw:
        try:
            c = centre_point(X, lift.closed_point)
            lift.centre = c.carrier
            key = (c.carrier, ideal_key(X.stalk(c.carrier), c.prime))
        except WorkbenchError:
            key = (lift.carrier, ideal_key(X.stalk(lift.carrier), lift.closed_point.prime))
        classes.setdefault(key, lift)
    logger.debug("lifts enumerated", sigma=sigma.describe(), raw=len(raw), classes=len(classes))
    return list(classes.values())


def v_proper_report(f: SchematicMorphism, suite: Sequence[SigmaPoint]) -> Report:
    if not suite:
        raise WorkbenchError("the valuative suite is empty")
    report = Report(command="vproper", subject=f.name).qualify(Qualifier.SAMPLED)
    if f.target.poset.height() > 1:
        report.notes.append(
            "base has height > 1: a single base carrier with comap images may not "
            "describe every A-point of the base"
        )
    counts = parallel_map(lambda s: len(v_lifts(f.source, s, f)), list(suite))
    for sigma, count in zip(suite, counts):
        report.add_row(point=sigma.describe(), lifts=count)
        report.lines.append(f"{sigma.describe()}: {count} lift(s)")
    separated = all(c <= 1 for c in counts)
    proper = all(c == 1 for c in counts)
    report.lines.append(f"v-separated on suite: {separated}")
    report.lines.append(f"v-proper on suite: {proper}")
    report.verdict = proper
    report.data.update(counts=counts, separated=separated, proper=proper)
    return report


def is_closed_immersion(f: SchematicMorphism, command: str = "closed-immersion") -> Report:
    """Affine by minima, and O_y -> O_{x_y} surjective at the minimum of every preimage"""
    report = Report(command=command, subject=f.name).qualify(Qualifier.CRITERION)
    Y = f.target
    failing = []

    def check(y):
        m = fiber_minimum(f, y)
        if m is None:
            return None, True
        phi = compose_maps([Y.restriction(y, f(m)), f.comap(m)])
        return m, is_surjective(phi)

    for y, (m, ok) in zip(Y.elements, parallel_map(check, list(Y.elements))):
        report.add_row(y=y, minimum=m, surjective=ok)
        if m is None:
            report.lines.append(f"{y}: empty preimage")
        elif not ok:
            failing.append(y)
            report.lines.append(f"{y}: O_{y} -> O_{m} is not surjective")
    report.verdict = not failing
    report.data["failing"] = failing
    return report


def is_separated(f: SchematicMorphism) -> Report:
    """The relative diagonal X -> X x_Y X is a closed immersion"""
    diag, square = diagonal(f)
    report = is_closed_immersion(diag, command="separated")
    report.subject = f.name
    report.lines.insert(0, f"diagonal into {len(square.space)}-point product")
    return report


def _product_over_base(member: SchematicMorphism, f: SchematicMorphism):
    base_leg = member.compose(f)
    return wide_fibered_product([base_leg, f], name=f"{member.source.name} x_Y {f.source.name}")


def prolocal_fp_check(
    f: SchematicMorphism,
    U: FlatImmersionFamily,
    V: Optional[Sequence[Optional[Sequence[Element]]]] = None,
    separated: Optional[Tuple[bool, bool]] = None,
) -> Report:
    """U covers X and every V^i covers U_i x_Y X; V[i] lists up-set generators, None for the identity"""
    if U.target is not f.source and U.target.elements != f.source.elements:
        raise WorkbenchError("the family U must cover the source of f")
    report = Report(command="prolocal-fp", subject=f.name).qualify(Qualifier.CRITERION)
    for member in U.members:
        if not is_affine(member.source):
            raise AffinenessUnverifiableError(
                f"member {member.name} has no minimum; its global sections are unavailable"
            )
    V = list(V) if V is not None else [None] * len(U)
    if len(V) != len(U):
        raise WorkbenchError(f"expected {len(U)} second-level families, got {len(V)}")

    ok = True
    top = is_covering(U)
    report.add_row(family="U", covering=top.verdict, failing=top.data["failing"])
    if not top.verdict:
        ok = False
        report.lines.append(f"U does not cover {U.target.name}: fails at {top.data['failing']}")
    for i, (member, generators) in enumerate(zip(U.members, V), start=1):
        product = _product_over_base(member, f).space
        family = (
            identity_family(product)
            if generators is None
            else open_cover_family(product, generators)
        )
        result = is_covering(family)
        report.add_row(family=f"V{i}", covering=result.verdict, failing=result.data["failing"])
        if not result.verdict:
            ok = False
            report.lines.append(f"V{i} does not cover U_{i} x_Y X: fails at {result.data['failing']}")
        for g in family.members:
            if not is_affine(g.source):
                report.notes.append(f"V{i} member {g.name} has no minimum; O(V) read stalkwise")

    if separated is None:
        separated = (
            is_separated(f).verdict,
            is_separated(to_point(f.target, build_point())).verdict,
        )
    report.add_row(f_separated=separated[0], base_separated=separated[1])
    report.notes.append(
        "O(U_i) -> O(V_j^i) is finitely presented: automatic for finitely presented QQ-algebras"
    )
    report.notes.append(
        f"the criterion assumes f and the base separated (f: {separated[0]}, base: {separated[1]})"
    )
    report.lines.append(f"pro-locally of finite presentation: criterion {'satisfied' if ok else 'not satisfied'}")
    report.verdict = ok
    report.data["separated"] = separated
    return report


def prolocal_proper_report(
    f: SchematicMorphism,
    U: FlatImmersionFamily,
    V: Optional[Sequence[Optional[Sequence[Element]]]],
    suite: Sequence[SigmaPoint],
) -> Report:
    """Pro-local finite presentation, separatedness and sampled v-properness together"""
    fp = prolocal_fp_check(f, U, V)
    valuative = v_proper_report(f, suite)
    f_sep, base_sep = fp.data["separated"]
    report = Report(command="prolocal-proper", subject=f.name).qualify(
        Qualifier.CRITERION, Qualifier.SAMPLED
    )
    report.add_row(check="prolocal-fp", holds=fp.verdict)
    report.add_row(check="separated", holds=f_sep)
    report.add_row(check="v-proper", holds=valuative.verdict)
    report.lines += fp.lines + valuative.lines
    report.notes += fp.notes + valuative.notes
    report.verdict = bool(fp.verdict and f_sep and valuative.verdict)
    return report
