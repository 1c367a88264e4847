"""Finitely presented QQ-algebras, ring maps and localization certificates.

A restriction map is only trusted as a flat epimorphism when it carries a
LocalizationCertificate: a witness s of the source, a declared inverse of its
image, and for every target variable an expression p/s^k with p in the source.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import structlog

from workbench.algebra.groebner import elimination_ideal, normal_form, radical_membership
from workbench.algebra.polynomials import (
    Ideal,
    Polynomial,
    block,
    constant,
    embed,
    format_polynomial,
    fresh_name,
    polynomial_ring,
    substitute,
    transport,
    uses_only,
)
from workbench.core.errors import (
    CertificateError,
    CertificateRequiredError,
    DegenerateLocalizationError,
    InvalidPrimeError,
    RingMapError,
    WorkbenchError,
)

logger = structlog.get_logger(__name__)


class PresentedRing:
    """QQ[variables]/relations; elements are polynomials compared by normal form"""

    def __init__(self, variables: Sequence[str], relations: Sequence[Polynomial] = ()):
        self.variables: Tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise WorkbenchError(f"duplicate variables in {list(self.variables)}")
        self.ring = polynomial_ring(self.variables)
        self.relations = Ideal(self.ring, [transport(r, self.ring) for r in relations])

    def __repr__(self) -> str:
        rels = ", ".join(format_polynomial(r) for r in self.relations.generators)
        return f"QQ[{', '.join(self.variables)}]/({rels})"

    @property
    def gens(self) -> Dict[str, Polynomial]:
        return dict(zip(self.variables, self.ring.gens))

    @property
    def one(self) -> Polynomial:
        return self.ring.one

    def element(self, value) -> Polynomial:
        if isinstance(value, (int, Fraction)):
            return constant(self.ring, value)
        return transport(value, self.ring)

    def reduce(self, f) -> Polynomial:
        return self.relations.reduce(self.element(f))

    def is_zero(self, f) -> bool:
        return not self.reduce(f)

    def equal(self, f, g) -> bool:
        return self.is_zero(self.element(f) - self.element(g))

    def is_zero_ring(self) -> bool:
        return self.relations.is_unit()

    def ideal(self, generators) -> Ideal:
        """An ideal of the ambient polynomial ring, relations not included"""
        return Ideal(self.ring, [self.element(g) for g in generators])

    def with_relations(self, generators) -> Ideal:
        return self.relations + [self.element(g) for g in generators]

    def format(self, f) -> str:
        return format_polynomial(self.reduce(f))

    def same_presentation(self, other: "PresentedRing") -> bool:
        return self.variables == other.variables and self.relations.same_as(
            other.relations
        )

    def key(self) -> Tuple:
        return self.variables, self.relations.key()


@dataclass
class LocalizationCertificate:
    """Witness s of the source, inverse of its image, and sections p/s^k"""

    witness: Polynomial
    inverse: Polynomial
    sections: Dict[str, Tuple[Polynomial, int]] = field(default_factory=dict)


class RingMap:
    """A QQ-algebra map source -> target given by images of the source variables"""

    def __init__(
        self,
        source: PresentedRing,
        target: PresentedRing,
        images: Union[Mapping[str, Polynomial], Sequence[Polynomial]],
        certificate: Optional[LocalizationCertificate] = None,
        asserted: bool = False,
        check: bool = True,
    ):
        self.source = source
        self.target = target
        if isinstance(images, Mapping):
            missing = [v for v in source.variables if v not in images]
            if missing:
                raise RingMapError(f"no image given for {missing}")
            images = [images[v] for v in source.variables]
        if len(images) != len(source.variables):
            raise RingMapError("image count does not match the source variables")
        self.images: Tuple[Polynomial, ...] = tuple(target.reduce(i) for i in images)
        self.certificate = certificate
        self.asserted = asserted
        if check:
            self._check_relations()

    def _check_relations(self):
        for rel in self.source.relations.generators:
            if not self.target.is_zero(self.apply_raw(rel)):
                raise RingMapError(
                    f"relation {format_polynomial(rel)} does not map to zero",
                    {"relation": format_polynomial(rel)},
                )

    def apply_raw(self, f: Polynomial) -> Polynomial:
        return substitute(self.source.element(f), self.images, self.target.ring)

    def __call__(self, f) -> Polynomial:
        return self.target.reduce(self.apply_raw(f))

    @property
    def image_map(self) -> Dict[str, Polynomial]:
        return dict(zip(self.source.variables, self.images))

    @property
    def is_certified(self) -> bool:
        return self.certificate is not None

    def equals(self, other: "RingMap") -> bool:
        return all(self.target.equal(a, b) for a, b in zip(self.images, other.images))

    def then(self, after: "RingMap") -> "RingMap":
        """after o self, certified when both links are"""
        return compose_maps([self, after])

    def __repr__(self) -> str:
        body = ", ".join(
            f"{v} -> {format_polynomial(i)}" for v, i in zip(self.source.variables, self.images)
        )
        return f"RingMap({body})"


def identity(A: PresentedRing) -> RingMap:
    gens = A.gens
    certificate = LocalizationCertificate(
        witness=A.one, inverse=A.one, sections={v: (g, 0) for v, g in gens.items()}
    )
    return RingMap(A, A, list(A.ring.gens), certificate, check=False)


def verify_certificate(phi: RingMap) -> List[str]:
    """Problems found while checking phi's certificate; empty means verified"""
    cert = phi.certificate
    if cert is None:
        return ["no certificate"]
    A, B = phi.source, phi.target
    problems: List[str] = []
    s = A.element(cert.witness)
    inverse = B.element(cert.inverse)

    if not B.equal(phi(s) * inverse, 1):
        problems.append(f"declared inverse of {format_polynomial(s)} is not an inverse")
    for var, gen in B.gens.items():
        if var not in cert.sections:
            problems.append(f"no section for {var}")
            continue
        p, k = cert.sections[var]
        if not B.equal(gen, phi(A.element(p)) * inverse**k):
            problems.append(f"section for {var} does not reproduce it")
    if problems:
        return problems

    # injectivity of A[w]/(ws - 1) -> B
    m, n = len(B.variables), len(A.variables)
    names = tuple(f"_t{i}" for i in range(m)) + tuple(f"_s{j}" for j in range(n)) + ("_w",)
    ambient = polynomial_ring(names, block(m))
    t_pos = list(range(m))
    s_pos = list(range(m, m + n))
    w = ambient.gens[-1]
    generators = [embed(r, ambient, t_pos) for r in B.relations.generators]
    generators += [
        ambient.gens[m + j] - embed(img, ambient, t_pos) for j, img in enumerate(phi.images)
    ]
    generators.append(w - embed(inverse, ambient, t_pos))
    kernel = elimination_ideal(Ideal(ambient, generators), names[m:])
    local_ring = kernel.ring
    local_positions = list(range(n))
    localized = Ideal(
        local_ring,
        [embed(r, local_ring, local_positions) for r in A.relations.generators]
        + [local_ring.gens[-1] * embed(s, local_ring, local_positions) - local_ring.one],
    )
    for g in kernel.generators:
        if not localized.contains(g):
            problems.append("comparison map from the localization is not injective")
            break
    return problems


def require_verified(phi: RingMap, label: str = "") -> None:
    problems = verify_certificate(phi)
    if problems:
        raise CertificateError(
            f"certificate {label} rejected: {problems[0]}".strip(), {"problems": problems}
        )


def localize(A: PresentedRing, s) -> Tuple[PresentedRing, RingMap]:
    """A[w]/(relations + (w*s - 1)) with its tautological certificate"""
    s = A.reduce(s)
    if not s:
        raise DegenerateLocalizationError("cannot localize at zero")
    w = fresh_name("w", A.variables)
    B = PresentedRing(A.variables + (w,), [])
    w_gen = B.gens[w]
    relations = [B.element(r) for r in A.relations.generators]
    relations.append(w_gen * B.element(s) - B.one)
    B = PresentedRing(B.variables, relations)
    if B.is_zero_ring():
        raise DegenerateLocalizationError(
            f"{format_polynomial(s)} is nilpotent; the localization is the zero ring"
        )
    certificate = LocalizationCertificate(
        witness=s,
        inverse=B.gens[w],
        sections={**{v: (g, 0) for v, g in A.gens.items()}, w: (A.one, 1)},
    )
    images = [B.gens[v] for v in A.variables]
    return B, RingMap(A, B, images, certificate)


def _graph_ideal(phi: RingMap, extra: Sequence[Polynomial] = ()) -> Tuple[Ideal, Tuple[str, ...]]:
    """rel_B(t) + extra(t) + (s_j - phi(a_j)(t)) under a block order eliminating t"""
    A, B = phi.source, phi.target
    m, n = len(B.variables), len(A.variables)
    names = tuple(f"_t{i}" for i in range(m)) + tuple(f"_s{j}" for j in range(n))
    ambient = polynomial_ring(names, block(m))
    t_pos = list(range(m))
    generators = [embed(r, ambient, t_pos) for r in B.relations.generators]
    generators += [embed(B.element(e), ambient, t_pos) for e in extra]
    generators += [
        ambient.gens[m + j] - embed(img, ambient, t_pos) for j, img in enumerate(phi.images)
    ]
    return Ideal(ambient, generators), names


def _back_to_source(ideal: Ideal, A: PresentedRing) -> Ideal:
    positions = list(range(len(A.variables)))
    reduced = [A.reduce(embed(g, A.ring, positions)) for g in ideal.generators]
    return Ideal(A.ring, [g for g in reduced if g])


def map_kernel(phi: RingMap) -> Ideal:
    """Kernel of phi as an ideal of the source, generators reduced modulo its relations"""
    graph, names = _graph_ideal(phi)
    kept = names[len(phi.target.variables) :]
    return _back_to_source(elimination_ideal(graph, kept), phi.source)


def is_surjective(phi: RingMap) -> bool:
    """Every target variable reduces modulo the graph ideal into the source variables"""
    m = len(phi.target.variables)
    if m == 0:
        return True
    graph, names = _graph_ideal(phi)
    basis_order = block(m)
    basis = graph.groebner_basis(basis_order)
    source_positions = range(m, len(names))
    for gen in graph.ring.gens[:m]:
        if not uses_only(normal_form(gen, basis, basis_order), source_positions):
            return False
    return True


def is_isomorphism(phi: RingMap) -> bool:
    return is_surjective(phi) and map_kernel(phi).is_zero()


def prime_preimage(phi: RingMap, prime: Ideal) -> Ideal:
    """phi^{-1}(p) for a proper ideal p of the target"""
    B = phi.target
    generators = [B.element(g) for g in prime.generators]
    if B.with_relations(generators).is_unit():
        raise InvalidPrimeError("the ideal is not proper")
    graph, names = _graph_ideal(phi, generators)
    kept = names[len(B.variables) :]
    return _back_to_source(elimination_ideal(graph, kept), phi.source)


def _expand(q: Polynomial, phi: RingMap) -> Tuple[Polynomial, int]:
    """Write q in phi.target as phi(P) * inverse^K using phi's sections"""
    cert = phi.certificate
    A, B = phi.source, phi.target
    s = A.element(cert.witness)
    sections = [(A.element(cert.sections[v][0]), cert.sections[v][1]) for v in B.variables]
    terms = B.element(q).terms()
    if not terms:
        return A.ring.zero, 0
    weights = [sum(e * sections[i][1] for i, e in enumerate(monom)) for monom, _ in terms]
    K = max(weights)
    total = A.ring.zero
    for (monom, coeff), weight in zip(terms, weights):
        term = A.one * coeff * s ** (K - weight)
        for i, e in enumerate(monom):
            if e:
                term = term * sections[i][0] ** e
        total = total + term
    return A.reduce(total), K


def composite_certificate(chain: Sequence[RingMap]) -> LocalizationCertificate:
    """Certificate of the composite of a chain of certified localizations"""
    if not chain:
        raise WorkbenchError("empty chain")
    for link in chain:
        if link.certificate is None:
            raise CertificateRequiredError(
                "uncertified link in a composite restriction", {"link": repr(link)}
            )
    current = chain[0]
    cert = current.certificate
    A = current.source
    for link in chain[1:]:
        C = link.target
        s = A.element(cert.witness)
        P, K = _expand(link.certificate.witness, current)
        inverse = C.reduce(
            link(current.target.element(cert.inverse)) ** (K + 1)
            * C.element(link.certificate.inverse)
        )
        sections = {}
        for var in C.variables:
            q, m = link.certificate.sections[var]
            Q, L = _expand(q, current)
            sections[var] = (A.reduce(Q * P**L * s ** ((K + 1) * m)), L + m)
        cert = LocalizationCertificate(witness=A.reduce(s * P), inverse=inverse, sections=sections)
        current = RingMap(A, C, [link(i) for i in current.images], cert, check=False)
    return cert


def compose_certificates(chain: Sequence[RingMap]) -> Polynomial:
    """A single witness of the first source whose localization is the composite"""
    return composite_certificate(chain).witness


def compose_maps(chain: Sequence[RingMap]) -> RingMap:
    """The composite map, certified when every link is"""
    first = chain[0]
    images = list(first.images)
    for link in chain[1:]:
        images = [link(i) for i in images]
    certificate = None
    if all(link.certificate is not None for link in chain):
        certificate = composite_certificate(chain)
    asserted = any(link.asserted for link in chain)
    return RingMap(first.source, chain[-1].target, images, certificate, asserted, check=False)


class TensorProduct:
    """Iterated tensor product of R-algebras A_i given by legs R -> A_i.

    Colliding variable names of later factors are renamed with a factor suffix.
    Coprojections and the structure map carry base-change certificates
    whenever the legs they are built from are certified.
    """

    def __init__(self, legs: Sequence[RingMap]):
        if not legs:
            raise WorkbenchError("tensor product of an empty family")
        self.legs: Tuple[RingMap, ...] = tuple(legs)
        self.base = legs[0].source
        for leg in legs[1:]:
            if leg.source.variables != self.base.variables:
                raise WorkbenchError("tensor legs do not share a common source")

        used: set = set()
        self.names: List[Dict[str, str]] = []
        for i, leg in enumerate(legs):
            renames = {}
            for v in leg.target.variables:
                candidate = v
                while candidate in used:
                    candidate = f"{candidate}_{i + 1}"
                used.add(candidate)
                renames[v] = candidate
            self.names.append(renames)

        variables = [self.names[i][v] for i, leg in enumerate(legs) for v in leg.target.variables]
        scratch = PresentedRing(variables)
        relations = []
        for i, leg in enumerate(legs):
            relations += [self._lift(i, r, scratch) for r in leg.target.relations.generators]
        first = legs[0]
        for i, leg in enumerate(legs[1:], start=1):
            for img0, img in zip(first.images, leg.images):
                relations.append(self._lift(0, img0, scratch) - self._lift(i, img, scratch))
        self.ring = PresentedRing(variables, relations)

        self.structure = self._structure_map()
        self.coprojections: Tuple[RingMap, ...] = tuple(
            self._coprojection(i) for i in range(len(legs))
        )

    def _lift(self, i: int, f: Polynomial, ring: PresentedRing = None) -> Polynomial:
        ring = ring or self.ring
        A = self.legs[i].target
        positions = [ring.variables.index(self.names[i][v]) for v in A.variables]
        return embed(A.element(f), ring.ring, positions)

    def lift(self, i: int, f) -> Polynomial:
        """Image of an element of the i-th factor"""
        return self.ring.reduce(self._lift(i, f))

    def is_zero_ring(self) -> bool:
        return self.ring.is_zero_ring()

    def _structure_map(self) -> RingMap:
        images = [self.lift(0, img) for img in self.legs[0].images]
        certificate = self._inclusion_certificate([], identity(self.base), None)
        return RingMap(self.base, self.ring, images, certificate, check=False)

    def _coprojection(self, i: int) -> RingMap:
        A = self.legs[i].target
        images = [self.ring.gens[self.names[i][v]] for v in A.variables]
        certificate = self._inclusion_certificate(
            [i], self.legs[i], lambda l, v: A.gens[v]
        )
        return RingMap(A, self.ring, images, certificate, check=False)

    def inclusion(self, kept: Sequence[int], sub: "TensorProduct") -> RingMap:
        """The map from the tensor product of the kept factors into this one"""
        kept = list(kept)
        images = {}
        for m, l in enumerate(kept):
            for v, sub_name in sub.names[m].items():
                images[sub_name] = self.ring.gens[self.names[l][v]]

        def sub_var(l: int, v: str) -> Polynomial:
            return sub.ring.gens[sub.names[kept.index(l)][v]]

        certificate = self._inclusion_certificate(kept, sub.structure, sub_var)
        return RingMap(sub.ring, self.ring, images, certificate, check=False)

    def _inclusion_certificate(
        self,
        kept: Sequence[int],
        sub_structure: RingMap,
        sub_var: Optional[Callable[[int, str], Polynomial]],
    ) -> Optional[LocalizationCertificate]:
        dropped = [j for j in range(len(self.legs)) if j not in kept]
        if any(self.legs[j].certificate is None for j in dropped):
            return None
        R = self.base
        sigma = {j: R.element(self.legs[j].certificate.witness) for j in dropped}
        witness = R.one
        for j in dropped:
            witness = witness * sigma[j]
        inverse = self.ring.one
        for j in dropped:
            inverse = inverse * self.lift(j, self.legs[j].certificate.inverse)
        sections = {}
        for l, leg in enumerate(self.legs):
            for v in leg.target.variables:
                name = self.names[l][v]
                if l in kept:
                    sections[name] = (sub_var(l, v), 0)
                    continue
                p, k = leg.certificate.sections[v]
                others = R.element(p)
                for j in dropped:
                    if j != l:
                        others = others * sigma[j] ** k
                sections[name] = (sub_structure(others), k)
        return LocalizationCertificate(
            witness=sub_structure(witness), inverse=self.ring.reduce(inverse), sections=sections
        )


def tensor_product(f: RingMap, g: RingMap) -> Tuple[PresentedRing, RingMap, RingMap]:
    """A (x)_R B on disjoint variable lists with its two coprojections"""
    product = TensorProduct([f, g])
    return product.ring, product.coprojections[0], product.coprojections[1]


def radical_contains(A: PresentedRing, f, generators) -> bool:
    """f lies in the radical of (generators) + relations in A"""
    return radical_membership(A.element(f), A.with_relations(generators))


def ideal_key(A: PresentedRing, ideal: Ideal) -> Tuple[str, ...]:
    return A.with_relations(ideal.generators).key()
