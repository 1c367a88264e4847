"""Fibered products, cylinders of data, nerves of flat-immersion families."""

from dataclasses import dataclass, field
from itertools import combinations
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

import structlog

from workbench.algebra.posets import Element, Poset, minimum, subsets_poset
from workbench.algebra.rings import (
    LocalizationCertificate,
    RingMap,
    TensorProduct,
    compose_maps,
    is_isomorphism,
)
from workbench.core.concurrency import parallel_map
from workbench.core.errors import (
    AffinenessUnverifiableError,
    CertificateRequiredError,
    ConstructionError,
    FunctorialityError,
    PosetError,
)
from workbench.geometry.morphisms import SchematicMorphism, global_sections, open_immersion
from workbench.geometry.spaces import RingedSpace
from workbench.models.reports import Report

logger = structlog.get_logger(__name__)


def _product_label(xs: Sequence[Element], b: Element) -> str:
    if len(xs) == 2:
        return f"({xs[0]},{b},{xs[1]})"
    return "(" + ",".join(str(x) for x in xs) + f"|{b})"


@dataclass
class FiberedProduct:
    """X_1 x_B ... x_B X_k with its projections and the structure morphism to B"""

    space: RingedSpace
    factors: Tuple[SchematicMorphism, ...]
    components: Dict[str, Tuple[Tuple[Element, ...], Element]]
    tensors: Dict[str, TensorProduct]
    projections: Tuple[SchematicMorphism, ...] = ()
    structure: Optional[SchematicMorphism] = None
    dropped: List[str] = field(default_factory=list)

    def point(self, xs: Sequence[Element], b: Element) -> str:
        return _product_label(tuple(xs), b)


def _leg(f: SchematicMorphism, x: Element, b: Element) -> RingMap:
    """O_{B,b} -> O_{B,f(x)} -> O_{X,x}"""
    return compose_maps([f.target.restriction(b, f(x)), f.comap(x)])


def _product_restriction(
    factors: Sequence[SchematicMorphism],
    low: Tuple[Tuple[Element, ...], Element],
    high: Tuple[Tuple[Element, ...], Element],
    T: TensorProduct,
    T2: TensorProduct,
) -> RingMap:
    xs, _ = low
    ys, _ = high
    rhos = [f.source.restriction(x, y) for f, x, y in zip(factors, xs, ys)]
    images = {}
    for i, rho in enumerate(rhos):
        A = rho.source
        for v in A.variables:
            images[T.names[i][v]] = T2.lift(i, rho(A.gens[v]))

    certificate = None
    if all(rho.certificate is not None for rho in rhos):
        witnesses = [T.lift(i, rho.certificate.witness) for i, rho in enumerate(rhos)]
        witness = T.ring.one
        for s in witnesses:
            witness = witness * s
        inverse = T2.ring.one
        for i, rho in enumerate(rhos):
            inverse = inverse * T2.lift(i, rho.certificate.inverse)
        sections = {}
        for i, rho in enumerate(rhos):
            for v in rho.target.variables:
                q, k = rho.certificate.sections[v]
                p = T.lift(i, q)
                for j, s in enumerate(witnesses):
                    if j != i:
                        p = p * s**k
                sections[T2.names[i][v]] = (T.ring.reduce(p), k)
        certificate = LocalizationCertificate(
            witness=T.ring.reduce(witness), inverse=T2.ring.reduce(inverse), sections=sections
        )
    return RingMap(T.ring, T2.ring, images, certificate)


def wide_fibered_product(factors: Sequence[SchematicMorphism], name: str = "") -> FiberedProduct:
    """Points (x_1, ..., x_k, b) with b <= f_i(x_i); points with zero stalk are dropped"""
    factors = tuple(factors)
    if len(factors) < 2:
        raise ConstructionError("a fibered product needs at least two factors")
    B = factors[0].target
    for f in factors[1:]:
        if f.target is not B and f.target.elements != B.elements:
            raise ConstructionError("fibered product factors have different targets")

    candidates = []
    for xs in cartesian(*[f.source.elements for f in factors]):
        for b in B.elements:
            if all(B.poset.le(b, f(x)) for f, x in zip(factors, xs)):
                candidates.append((tuple(xs), b))

    def build(candidate):
        xs, b = candidate
        return TensorProduct([_leg(f, x, b) for f, x in zip(factors, xs)])

    tensors_list = parallel_map(build, candidates)
    components: Dict[str, Tuple[Tuple[Element, ...], Element]] = {}
    tensors: Dict[str, TensorProduct] = {}
    dropped = []
    for candidate, T in zip(candidates, tensors_list):
        label = _product_label(*candidate)
        if T.is_zero_ring():
            dropped.append(label)
            continue
        components[label] = candidate
        tensors[label] = T

    def le(p, q):
        (xs, b), (ys, c) = components[p], components[q]
        return B.poset.le(b, c) and all(
            f.source.poset.le(x, y) for f, x, y in zip(factors, xs, ys)
        )

    poset = Poset.from_order(list(components), le)
    restrictions = {
        (p, q): _product_restriction(factors, components[p], components[q], tensors[p], tensors[q])
        for p, q in poset.covers()
    }
    name = name or " x ".join(f.source.name for f in factors)
    space = RingedSpace(poset, {p: tensors[p].ring for p in poset}, restrictions, name=name)

    projections = []
    for i, f in enumerate(factors):
        projections.append(
            SchematicMorphism(
                space,
                f.source,
                {p: components[p][0][i] for p in poset},
                {p: tensors[p].coprojections[i] for p in poset},
                name=f"pr{i + 1}",
            )
        )
    structure = SchematicMorphism(
        space,
        B,
        {p: components[p][1] for p in poset},
        {p: tensors[p].structure for p in poset},
        name="structure",
    )
    if dropped:
        logger.info("empty product points dropped", product=name, dropped=len(dropped))
    return FiberedProduct(
        space, factors, components, tensors, tuple(projections), structure, dropped
    )


def fibered_product(
    f: SchematicMorphism, g: SchematicMorphism
) -> Tuple[RingedSpace, SchematicMorphism, SchematicMorphism]:
    """X x_B Y on triples (x, b, y) with both projections"""
    result = wide_fibered_product([f, g])
    return result.space, result.projections[0], result.projections[1]


def diagonal(f: SchematicMorphism) -> Tuple[SchematicMorphism, FiberedProduct]:
    """X -> X x_Y X, x -> (x, f(x), x), with multiplication comaps"""
    square = wide_fibered_product([f, f], name=f"{f.source.name} x_{f.target.name} {f.source.name}")
    X = f.source
    mapping, comaps = {}, {}
    for x in X:
        label = square.point((x, x), f(x))
        if label not in square.tensors:
            raise ConstructionError(f"diagonal point of {x} has a zero stalk")
        T = square.tensors[label]
        A = X.stalk(x)
        images = {}
        for i in range(2):
            for v in A.variables:
                images[T.names[i][v]] = A.gens[v]
        mapping[x] = label
        comaps[x] = RingMap(T.ring, A, images)
    return SchematicMorphism(X, square.space, mapping, comaps, name=f"diag({f.name})"), square


class Datum:
    """A functor from an index poset to spaces, contravariant on transitions.

    transitions[(p, q)] for p <= q is a morphism X(q) -> X(p); only covers need
    to be given, the rest are composed along covering chains.
    """

    def __init__(
        self,
        index: Poset,
        spaces: Dict[Element, RingedSpace],
        transitions: Dict[Tuple[Element, Element], SchematicMorphism],
    ):
        self.index = index
        missing = [p for p in index if p not in spaces]
        if missing:
            raise ConstructionError(f"datum has no space at {missing}")
        self.spaces = {p: spaces[p] for p in index}
        self._transitions: Dict[Tuple[Element, Element], SchematicMorphism] = {}
        for (p, q), t in transitions.items():
            if not index.le(p, q):
                raise ConstructionError(f"transition given for {p}, {q} which are not ordered")
            if t.source is not self.spaces[q] or t.target is not self.spaces[p]:
                raise ConstructionError(f"transition {p} <= {q} does not run X({q}) -> X({p})")
            self._transitions[(p, q)] = t
        for p, q in index.covers():
            if (p, q) not in self._transitions:
                raise ConstructionError(f"datum has no transition for {p} <= {q}")

    def __repr__(self) -> str:
        return f"Datum({len(self.index)} entries)"

    def sizes(self) -> Dict[Element, int]:
        return {p: len(X) for p, X in self.spaces.items()}

    def transition(self, p: Element, q: Element) -> SchematicMorphism:
        if (p, q) not in self._transitions:
            if p == q:
                self._transitions[(p, q)] = SchematicMorphism.identity(self.spaces[p])
            else:
                chain = self.index.covering_chain(p, q)
                result = self._transitions[(chain[-2], chain[-1])]
                for a, b in reversed(list(zip(chain, chain[1:]))[:-1]):
                    result = result.compose(self._transitions[(a, b)])
                self._transitions[(p, q)] = result
        return self._transitions[(p, q)]

    def check(self) -> "Datum":
        """Composites along different covering chains agree"""
        P = self.index
        for p in P:
            for q in P.up_set(p):
                if p == q:
                    continue
                direct = self.transition(p, q)
                for r in P.upper_covers(p):
                    if r == q or not P.le(r, q):
                        continue
                    routed = self.transition(r, q).compose(self.transition(p, r))
                    for y in self.spaces[q]:
                        same = direct(y) == routed(y) and direct.comap(y).equals(routed.comap(y))
                        if not same:
                            raise FunctorialityError(
                                f"transitions {p} <= {r} <= {q} disagree at {y}",
                                {"lower": str(p), "via": str(r), "upper": str(q)},
                            )
        return self


def _cylinder_label(x: Element, p: Element, single: bool) -> str:
    return str(x) if single else f"{x}@{p}"


def cylinder(D: Datum, name: str = "Cyl") -> RingedSpace:
    """Underlying set the disjoint union of the X(p); x_p <= y_q iff p <= q and x_p <= T_pq(y_q)"""
    single = len(D.index) == 1
    points: Dict[str, Tuple[Element, Element]] = {}
    for p in D.index:
        for x in D.spaces[p]:
            points[_cylinder_label(x, p, single)] = (x, p)

    def le(a, b):
        (x, p), (y, q) = points[a], points[b]
        if not D.index.le(p, q):
            return False
        return D.spaces[p].poset.le(x, D.transition(p, q)(y))

    try:
        poset = Poset.from_order(list(points), le)
    except PosetError as e:
        raise ConstructionError(f"glued order is not a partial order: {e.message}") from e

    restrictions = {}
    for a, b in poset.covers():
        (x, p), (y, q) = points[a], points[b]
        t = D.transition(p, q)
        r = D.spaces[p].restriction(x, t(y))
        restrictions[(a, b)] = compose_maps([r, t.comap(y)])
    stalks = {a: D.spaces[points[a][1]].stalk(points[a][0]) for a in poset}
    logger.info("cylinder built", points=len(poset), entries=len(D.index))
    return RingedSpace(poset, stalks, restrictions, name=name)


class FlatImmersionFamily:
    """Morphisms U_i -> X whose comaps are certified localizations"""

    def __init__(self, target: RingedSpace, members: Sequence[SchematicMorphism]):
        if not members:
            raise ConstructionError("a family needs at least one member")
        self.target = target
        self.members: Tuple[SchematicMorphism, ...] = tuple(members)
        for i, f in enumerate(self.members):
            if f.target is not target and f.target.elements != target.elements:
                raise ConstructionError(f"member {i + 1} does not map to {target.name}")
            for x in f.source:
                if f.comap(x).certificate is None:
                    raise CertificateRequiredError(
                        f"member {f.name} is not a certified flat immersion at {x}",
                        {"member": f.name, "element": str(x)},
                    )

    def __len__(self) -> int:
        return len(self.members)


def diagonal_is_qc_trivial(f: SchematicMorphism) -> bool:
    """Every diagonal comap O_x (x)_{O_f(x)} O_x -> O_x is an isomorphism"""
    diag, _ = diagonal(f)
    return all(is_isomorphism(diag.comap(x)) for x in f.source)


def _index_label(subset: Tuple[int, ...]) -> str:
    return "{" + ",".join(str(i + 1) for i in subset) + "}"


@dataclass
class Nerve:
    datum: Datum
    family: FlatImmersionFamily
    products: Dict[str, FiberedProduct]
    augmentation: Dict[str, Tuple[Element, RingMap]]
    covering: bool
    diagonal_flags: List[bool]

    @property
    def qc_isomorphism(self) -> bool:
        return self.covering


def nerve(F: FlatImmersionFamily) -> Nerve:
    """Datum on nonempty subsets of the index set: U(D) = product of the U_i, i in D, over X"""
    k = len(F)
    index = subsets_poset(k - 1, label=_index_label)
    subsets = {_index_label(c): c for c in _subsets(k)}

    def build(label):
        c = subsets[label]
        if len(c) == 1:
            return None
        return wide_fibered_product([F.members[i] for i in c], name=f"U{label}")

    built = dict(zip(index.elements, parallel_map(build, list(index.elements))))
    spaces: Dict[Element, RingedSpace] = {}
    products: Dict[str, FiberedProduct] = {}
    for label, c in subsets.items():
        if built[label] is None:
            spaces[label] = F.members[c[0]].source
        else:
            products[label] = built[label]
            spaces[label] = built[label].space

    transitions = {}
    for low, high in index.covers():
        transitions[(low, high)] = _nerve_transition(
            F, subsets[low], subsets[high], spaces[low], products.get(low), products[high]
        )
    datum = Datum(index, spaces, transitions)

    augmentation: Dict[str, Tuple[Element, RingMap]] = {}
    single = len(index) == 1
    for label in index:
        c = subsets[label]
        if label in products:
            P = products[label]
            for p in P.space:
                augmentation[_cylinder_label(p, label, single)] = (
                    P.components[p][1],
                    P.tensors[p].structure,
                )
        else:
            f = F.members[c[0]]
            for x in f.source:
                augmentation[_cylinder_label(x, label, single)] = (f(x), f.comap(x))

    covering = is_covering(F).verdict
    flags = [diagonal_is_qc_trivial(f) for f in F.members]
    logger.info(
        "nerve built", members=k, sizes=datum.sizes(), covering=covering, diagonals=flags
    )
    return Nerve(datum, F, products, augmentation, covering, flags)


def _subsets(k: int) -> List[Tuple[int, ...]]:
    return [c for size in range(1, k + 1) for c in combinations(range(k), size)]


def _nerve_transition(
    F: FlatImmersionFamily,
    low: Tuple[int, ...],
    high: Tuple[int, ...],
    low_space: RingedSpace,
    low_product: Optional[FiberedProduct],
    high_product: FiberedProduct,
) -> SchematicMorphism:
    """U(high) -> U(low) forgetting the components outside low"""
    kept = [high.index(i) for i in low]
    mapping, comaps = {}, {}
    for p in high_product.space:
        xs, b = high_product.components[p]
        T = high_product.tensors[p]
        if low_product is None:
            mapping[p] = xs[kept[0]]
            comaps[p] = T.coprojections[kept[0]]
        else:
            q = low_product.point([xs[i] for i in kept], b)
            mapping[p] = q
            comaps[p] = T.inclusion(kept, low_product.tensors[q])
    return SchematicMorphism(high_product.space, low_space, mapping, comaps, name="forget")


def is_covering(F: FlatImmersionFamily) -> Report:
    """At every y the witnesses of member points over U_y generate the unit ideal"""
    X = F.target
    report = Report(command="covering", subject=X.name)
    failing = []

    def check(y):
        A = X.stalk(y)
        witnesses = []
        for f in F.members:
            for u in f.source:
                if X.poset.le(y, f(u)):
                    chain = compose_maps([X.restriction(y, f(u)), f.comap(u)])
                    if chain.certificate is None:
                        raise CertificateRequiredError(f"member {f.name} is uncertified at {u}")
                    witnesses.append(A.reduce(chain.certificate.witness))
        return A.with_relations(witnesses).is_unit(), [A.format(w) for w in witnesses]

    for y, (ok, witnesses) in zip(X.elements, parallel_map(check, X.elements)):
        report.add_row(y=y, witnesses=witnesses, covered=ok)
        if not ok:
            failing.append(y)
            report.lines.append(f"not covered at {y}: witnesses ({', '.join(witnesses) or '-'})")
    report.verdict = not failing
    report.data["failing"] = failing
    return report


def collapse_affine(D: Datum, name: str = "collapsed") -> RingedSpace:
    """Replace every X(p) by the point carrying O(X(p)); the poset becomes the index poset"""
    minima = {}
    for p, X in D.spaces.items():
        m = minimum(X.poset, X.elements)
        if m is None:
            raise AffinenessUnverifiableError(
                f"entry {p} has no minimum; its global sections are unavailable",
                {"entry": str(p)},
            )
        minima[p] = m
    stalks = {p: global_sections(D.spaces[p]) for p in D.index}
    restrictions = {}
    for p, q in D.index.covers():
        t = D.transition(p, q)
        m_q = minima[q]
        r = D.spaces[p].restriction(minima[p], t(m_q))
        restrictions[(p, q)] = compose_maps([r, t.comap(m_q)])
    return RingedSpace(D.index, stalks, restrictions, name=name)


def open_cover_family(X: RingedSpace, elements: Sequence[Element]) -> FlatImmersionFamily:
    """The family of up-set inclusions U_x -> X"""
    return FlatImmersionFamily(X, [open_immersion(X, x) for x in elements])


def identity_family(X: RingedSpace) -> FlatImmersionFamily:
    return FlatImmersionFamily(X, [SchematicMorphism.identity(X)])

