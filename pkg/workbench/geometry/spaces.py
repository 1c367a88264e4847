"""Finite ringed posets and their validators.

Opens are up-sets, so the restriction r(x, z) for x <= z runs from the stalk
at x to the stalk at z. Only covering relations carry explicit maps; every
other restriction is composed along the lexicographically least covering
chain and inherits a composed localization certificate.
"""

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import structlog

from workbench.algebra.polynomials import Ideal
from workbench.algebra.posets import Element, Poset
from workbench.algebra.rings import (
    PresentedRing,
    RingMap,
    compose_maps,
    ideal_key,
    identity,
    prime_preimage,
    radical_contains,
    require_verified,
    verify_certificate,
)
from workbench.core.concurrency import parallel_map
from workbench.core.config import settings
from workbench.core.errors import (
    CertificateRequiredError,
    ConstructionError,
    InvalidPrimeError,
    SaturationError,
    SchematicityViolation,
    WorkbenchError,
)
from workbench.models.reports import Qualifier, Report

logger = structlog.get_logger(__name__)

Edge = Tuple[Element, Element]


class RingedSpace:
    """A finite poset with a presented ring at every point and maps along covers"""

    def __init__(
        self,
        poset: Poset,
        stalks: Dict[Element, PresentedRing],
        restrictions: Dict[Edge, RingMap],
        name: str = "X",
        assumed: Iterable[Edge] = (),
    ):
        self.name = name
        self.poset = poset
        missing = [x for x in poset if x not in stalks]
        if missing:
            raise ConstructionError(f"no stalk given for {missing}")
        self.stalks: Dict[Element, PresentedRing] = {x: stalks[x] for x in poset}
        for x, ring in self.stalks.items():
            if ring.is_zero_ring():
                raise ConstructionError(f"stalk at {x} is the zero ring", {"element": str(x)})

        covers = poset.covers()
        extra = [e for e in restrictions if e not in set(covers)]
        if extra:
            raise ConstructionError(
                f"restriction given for a non-covering pair {extra[0]}", {"pair": str(extra[0])}
            )
        self._restrictions: Dict[Edge, RingMap] = {}
        for x, y in covers:
            if (x, y) not in restrictions:
                raise ConstructionError(f"no restriction for the cover {x} < {y}")
            r = restrictions[(x, y)]
            if r.source.variables != self.stalks[x].variables or (
                r.target.variables != self.stalks[y].variables
            ):
                raise ConstructionError(f"restriction {x} -> {y} does not match the stalks")
            self._restrictions[(x, y)] = r
        self.assumed = {tuple(e) for e in assumed}
        self._composites: Dict[Edge, RingMap] = {}
        self.flags: Dict[str, Optional[bool]] = {"pseudoschematic": None, "schematic": None}

    def __repr__(self) -> str:
        return f"RingedSpace({self.name}, {len(self.poset)} points)"

    def __len__(self) -> int:
        return len(self.poset)

    def __iter__(self):
        return iter(self.poset)

    @property
    def elements(self) -> Tuple[Element, ...]:
        return self.poset.elements

    def stalk(self, x: Element) -> PresentedRing:
        self.poset.index(x)
        return self.stalks[x]

    def cover_map(self, x: Element, y: Element) -> RingMap:
        return self._restrictions[(x, y)]

    def edges(self) -> List[Edge]:
        return self.poset.covers()

    def restriction(self, x: Element, z: Element) -> RingMap:
        """r(x, z), composed along the lexicographically least covering chain"""
        key = (x, z)
        if key not in self._composites:
            if x == z:
                self._composites[key] = identity(self.stalk(x))
            else:
                chain = self.poset.covering_chain(x, z)
                self._composites[key] = self.compose_chain(chain)
        return self._composites[key]

    def compose_chain(self, chain: Sequence[Element]) -> RingMap:
        if len(chain) == 1:
            return identity(self.stalk(chain[0]))
        links = [self._restrictions[(a, b)] for a, b in zip(chain, chain[1:])]
        return compose_maps(links)

    def witness(self, x: Element, z: Element):
        """Composed certificate witness of r(x, z), an element of the stalk at x"""
        r = self.restriction(x, z)
        if r.certificate is None:
            raise CertificateRequiredError(f"restriction {x} -> {z} carries no certificate")
        return r.certificate.witness

    def subspace(self, elements: Iterable[Element], name: Optional[str] = None) -> "RingedSpace":
        """The induced ringed space on a subset (normally an up-set)"""
        poset = self.poset.restrict(elements)
        restrictions = {(x, y): self.restriction(x, y) for x, y in poset.covers()}
        assumed = [e for e in self.assumed if e[0] in poset and e[1] in poset]
        return RingedSpace(
            poset,
            {x: self.stalks[x] for x in poset},
            restrictions,
            name=name or f"{self.name}|sub",
            assumed=assumed,
        )

    def open_subspace(self, x: Element) -> "RingedSpace":
        return self.subspace(self.poset.up_set(x), name=f"U_{x}")


@dataclass
class PrimePoint:
    """A point of Spec(X): a carrier element and a prime of its stalk.

    Properness is checked; primality is taken on trust.
    """

    carrier: Element
    prime: Ideal

    @classmethod
    def of(cls, X: RingedSpace, carrier: Element, generators: Sequence) -> "PrimePoint":
        A = X.stalk(carrier)
        prime = A.ideal(generators)
        if A.with_relations(prime.generators).is_unit():
            raise InvalidPrimeError(
                f"the ideal at {carrier} is not proper", {"element": str(carrier)}
            )
        return cls(carrier, prime)

    def describe(self, X: RingedSpace) -> str:
        A = X.stalk(self.carrier)
        gens = ", ".join(A.format(g) for g in self.prime.generators) or "0"
        return f"({gens}) at {self.carrier}"


def edge_status(X: RingedSpace, x: Element, y: Element) -> Tuple[str, List[str]]:
    r = X.cover_map(x, y)
    if r.certificate is not None:
        problems = verify_certificate(r) if settings.VERIFY_CERTIFICATES else []
        return ("invalid" if problems else "certified"), problems
    if (x, y) in X.assumed or r.asserted:
        return "asserted", []
    return "missing", []


def squares(X: RingedSpace) -> Iterator[Tuple[Element, Element, Element, bool, str]]:
    """Every x < y < z with y a cover of x and z not: does x -> y -> z agree with x -> z?"""
    P = X.poset
    for x in P:
        for z in P.up_set(x):
            if x == z or z in P.upper_covers(x):
                continue
            for y in P.upper_covers(x):
                if not P.le(y, z):
                    continue
                error = ""
                try:
                    direct = X.restriction(x, z)
                    first, second = X.cover_map(x, y), X.restriction(y, z)
                    commutes = all(
                        X.stalk(z).equal(second(img), target)
                        for img, target in zip(first.images, direct.images)
                    )
                except WorkbenchError as e:
                    commutes, error = False, e.message
                yield x, y, z, commutes, error


def validate_space(X: RingedSpace) -> Report:
    """Per-edge certificate status and every functoriality square"""
    report = Report(command="validate", subject=X.name)
    ok = True
    for x, y in X.edges():
        status, problems = edge_status(X, x, y)
        report.add_row(kind="edge", lower=x, upper=y, status=status)
        report.lines.append(f"edge {x} -> {y}: {status}")
        report.lines += [f"  {p}" for p in problems]
        if status == "asserted":
            report.qualify(Qualifier.ASSUMED)
        ok &= status in ("certified", "asserted")

    for x, y, z, commutes, error in squares(X):
        report.add_row(kind="square", lower=x, via=y, upper=z, commutes=commutes)
        if error:
            report.lines.append(f"square {x} -> {y} -> {z}: {error}")
        if not commutes:
            report.lines.append(f"square {x} -> {y} -> {z} does not commute")
        ok &= commutes

    X.flags["pseudoschematic"] = ok
    report.verdict = ok
    report.data["pseudoschematic"] = ok
    logger.info("space validated", space=X.name, pseudoschematic=ok)
    return report


def require_certified(X: RingedSpace) -> None:
    for x, y in X.edges():
        r = X.cover_map(x, y)
        if r.certificate is None:
            raise CertificateRequiredError(
                f"restriction {x} -> {y} is not certified", {"lower": str(x), "upper": str(y)}
            )
        if settings.VERIFY_CERTIFICATES:
            require_verified(r, f"{x} -> {y}")


def _chain_witnesses_agree(X: RingedSpace, z: Element, x: Element) -> bool:
    A = X.stalk(z)
    reference = X.witness(z, x)
    for chain in X.poset.covering_chains(z, x):
        other = X.compose_chain(chain).certificate.witness
        if not (radical_contains(A, reference, [other]) and radical_contains(A, other, [reference])):
            return False
    return True


def check_schematic(X: RingedSpace) -> Report:
    """Faithful flatness of O_x (x)_{O_z} O_y -> prod_{t >= x, y} O_t for every z <= x, y"""
    require_certified(X)
    P = X.poset
    triples = [
        (z, x, y)
        for z in P
        for x, y in combinations(P.up_set(z), 2)
    ]

    def check(triple):
        z, x, y = triple
        A = X.stalk(z)
        f_x, f_y = X.witness(z, x), X.witness(z, y)
        above = [t for t in P.up_set(x) if P.le(y, t)]
        h = [X.witness(z, t) for t in above]
        return radical_contains(A, f_x * f_y, h), A.format(f_x), A.format(f_y), above

    results = parallel_map(check, triples)
    report = Report(command="schematic", subject=X.name)
    failures = []
    for (z, x, y), (ok, f_x, f_y, above) in zip(triples, results):
        report.add_row(z=z, x=x, y=y, witnesses=(f_x, f_y), upper_bounds=len(above), holds=ok)
        if not ok:
            failures.append((z, x, y, f_x, f_y))
            report.lines.append(
                f"fails at z={z} for x={x}, y={y}: witness pair ({f_x}, {f_y})"
            )

    if settings.CROSS_CHECK_CHAINS:
        for z in P:
            for x in P.up_set(z):
                if x == z:
                    continue
                if not _chain_witnesses_agree(X, z, x):
                    report.notes.append(f"covering chains {z} -> {x} give inequivalent witnesses")
                    failures.append((z, x, x, "", ""))

    verdict = not failures
    X.flags["schematic"] = verdict
    report.verdict = verdict
    report.data["failures"] = failures
    report.lines.insert(0, f"{len(triples)} triples checked")
    logger.info("schematic check", space=X.name, triples=len(triples), schematic=verdict)
    return report


def _transport_up(r: RingMap, prime: Ideal) -> List:
    return [r(g) for g in prime.generators]


def centre_point(X: RingedSpace, point: PrimePoint) -> PrimePoint:
    """The representative of point with maximal carrier, found by zig-zag saturation"""
    require_certified(X)
    start_ring = X.stalk(point.carrier)
    if start_ring.with_relations(point.prime.generators).is_unit():
        raise InvalidPrimeError("the ideal is not proper", {"element": str(point.carrier)})

    def key(x, gens):
        return x, ideal_key(X.stalk(x), X.stalk(x).ideal(gens))

    start_key = key(point.carrier, point.prime.generators)
    seen: Dict[Tuple, PrimePoint] = {start_key: point}
    queue = deque([point])
    bound = settings.CENTRE_STEP_FACTOR * len(X) ** 2
    steps = 0
    P = X.poset
    while queue:
        current = queue.popleft()
        steps += 1
        if steps > bound:
            raise SaturationError(
                f"centre search exceeded {bound} steps", {"start": point.describe(X)}
            )
        x = current.carrier
        A = X.stalk(x)
        closed = A.with_relations(current.prime.generators)
        moves = []
        for t in P.upper_covers(x):
            r = X.cover_map(x, t)
            if closed.contains(A.element(r.certificate.witness)):
                continue
            gens = _transport_up(r, current.prime)
            if X.stalk(t).with_relations(gens).is_unit():
                continue
            moves.append((t, gens))
        for z in P.lower_covers(x):
            r = X.cover_map(z, x)
            moves.append((z, list(prime_preimage(r, current.prime).generators)))
        for y, gens in moves:
            k = key(y, gens)
            if k not in seen:
                nxt = PrimePoint(y, X.stalk(y).ideal(gens))
                seen[k] = nxt
                queue.append(nxt)

    carriers = {p.carrier for p in seen.values()}
    tops = P.maximal_elements(carriers)
    if len(tops) != 1:
        raise SchematicityViolation(
            f"representatives of {point.describe(X)} have several maximal carriers {tops}",
            {"carriers": [str(t) for t in tops]},
        )
    top = tops[0]
    result = next(p for p in seen.values() if p.carrier == top)
    logger.debug("centre found", start=str(point.carrier), centre=str(top), states=len(seen))
    return result


def centre(X: RingedSpace, point: PrimePoint) -> Element:
    return centre_point(X, point).carrier


def centre_report(X: RingedSpace, point: PrimePoint) -> Report:
    result = centre_point(X, point)
    report = Report(command="centre", subject=X.name).qualify(Qualifier.ASSERTED_PRIME)
    report.add_row(start=point.carrier, centre=result.carrier)
    report.lines.append(f"centre of {point.describe(X)} is {result.carrier}")
    report.lines.append(f"prime there: {result.describe(X)}")
    report.data["centre"] = result.carrier
    return report

