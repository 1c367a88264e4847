"""YAML documents <-> workbench objects.

References to other documents are bundled example names (``p1_model``), paths
relative to the referring document, or inline mappings.
"""

import random
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import structlog
import yaml
from pydantic import ValidationError

from workbench.algebra.linalg import Matrix
from workbench.algebra.polynomials import format_polynomial
from workbench.algebra.posets import Poset
from workbench.algebra.ratfunc import random_rational_function
from workbench.algebra.rings import LocalizationCertificate, PresentedRing, RingMap
from workbench.core.config import settings
from workbench.core.errors import DocumentError, ValidationFailed, WorkbenchError
from workbench.geometry.builders import build_point
from workbench.geometry.cohomology import FiniteDiagram, twist_slice
from workbench.geometry.constructions import Datum
from workbench.geometry.criteria import BasePoint, SigmaPoint
from workbench.geometry.morphisms import SchematicMorphism, open_immersion, to_point
from workbench.geometry.spaces import RingedSpace, squares
from workbench.models.documents import (
    CoversDocument,
    DatumDocument,
    DiagramDocument,
    MorphismDocument,
    RingMapDocument,
    SpaceDocument,
    SuiteDocument,
)
from workbench.services.parser import parse_polynomial, parse_rational_function

logger = structlog.get_logger(__name__)

Reference = Union[str, Path, dict]


def bundled_names() -> List[str]:
    return sorted(p.stem for p in settings.data_dir.glob("*.yaml"))


def resolve(ref: Union[str, Path], base_dir: Optional[Path] = None) -> Path:
    ref = Path(ref)
    candidates = [ref, ref.with_name(ref.name + ".yaml")]
    if base_dir is not None and not ref.is_absolute():
        candidates += [base_dir / ref, base_dir / (str(ref) + ".yaml")]
    candidates += [settings.data_dir / (ref.stem + ".yaml")]
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise DocumentError(
        f"no document found for {str(ref)!r}", {"bundled": bundled_names()}
    )


def read_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            content = yaml.safe_load(handle)
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise DocumentError(f"{path} is not valid YAML: {e}") from e
    if not isinstance(content, dict):
        raise DocumentError(f"{path} does not contain a mapping")
    return content


def _validated(model, content: dict, origin: str):
    try:
        return model.model_validate(content)
    except ValidationError as e:
        problems = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        raise ValidationFailed(f"{origin} does not match the {model.__name__} schema", problems)


class Problems:
    """Collects parse errors so a document reports all of them at once"""

    def __init__(self, origin: str):
        self.origin = origin
        self.items: List[str] = []

    def attempt(self, where: str, fn, *args):
        try:
            return fn(*args)
        except WorkbenchError as e:
            self.items.append(f"{where}: {e.message}")
            return None

    def raise_if_any(self):
        if self.items:
            raise ValidationFailed(f"{self.origin} is invalid", self.items)


def _ring_map(
    doc: RingMapDocument,
    source: PresentedRing,
    target: PresentedRing,
    where: str,
    problems: Problems,
    asserted: bool = False,
) -> Optional[RingMap]:
    images = {}
    for v in source.variables:
        text = doc.images.get(v, v if v in target.variables else None)
        if text is None:
            problems.items.append(f"{where}: no image for {v}")
            return None
        images[v] = problems.attempt(f"{where}.images.{v}", parse_polynomial, text, target.variables)
    unknown = set(doc.images) - set(source.variables)
    if unknown:
        problems.items.append(f"{where}: images given for unknown variables {sorted(unknown)}")
    certificate = None
    if doc.certificate is not None:
        cert = doc.certificate
        witness = problems.attempt(f"{where}.witness", parse_polynomial, cert.witness, source.variables)
        inverse = problems.attempt(f"{where}.inverse", parse_polynomial, cert.inverse, target.variables)
        sections = {}
        for v, (text, k) in cert.sections.items():
            p = problems.attempt(f"{where}.sections.{v}", parse_polynomial, text, source.variables)
            sections[v] = (p, k)
        certificate = LocalizationCertificate(witness, inverse, sections)
    if any(i is None for i in images.values()) or (
        certificate is not None
        and (certificate.witness is None or certificate.inverse is None
             or any(p is None for p, _ in certificate.sections.values()))
    ):
        return None
    return problems.attempt(
        where, lambda: RingMap(source, target, images, certificate, asserted=asserted)
    )


class DocumentLoader:
    """Loads documents, sharing one object per referenced space file"""

    def __init__(self, validate: bool = True):
        self.validate = validate
        self._spaces: Dict[Path, RingedSpace] = {}

    def _content(self, ref: Reference, base_dir: Optional[Path]) -> Tuple[dict, Optional[Path], str]:
        if isinstance(ref, dict):
            return ref, base_dir, "inline document"
        path = resolve(ref, base_dir)
        return read_yaml(path), path.parent, str(path)

    def space(self, ref: Reference, base_dir: Optional[Path] = None) -> RingedSpace:
        if isinstance(ref, SpaceDocument):
            return self._build_space(ref, "inline space")
        if not isinstance(ref, dict):
            path = resolve(ref, base_dir).resolve()
            if path not in self._spaces:
                doc = _validated(SpaceDocument, read_yaml(path), str(path))
                self._spaces[path] = self._build_space(doc, str(path))
            return self._spaces[path]
        return self._build_space(_validated(SpaceDocument, ref, "inline space"), "inline space")

    def _build_space(self, doc: SpaceDocument, origin: str) -> RingedSpace:
        problems = Problems(origin)
        stalks = {}
        for name, stalk in doc.elements.items():
            relations = [
                problems.attempt(f"elements.{name}.relations", parse_polynomial, r, stalk.variables)
                for r in stalk.relations
            ]
            if all(r is not None for r in relations):
                stalks[name] = problems.attempt(
                    f"elements.{name}", PresentedRing, stalk.variables, relations
                )
        problems.raise_if_any()
        poset = problems.attempt("covers", Poset.from_relations, list(doc.elements), doc.covers)
        problems.raise_if_any()

        assumed = {tuple(p) for p in doc.assumed}
        restrictions = {}
        for r in doc.restrictions:
            where = f"restrictions.{r.source}->{r.target}"
            ring_map = _ring_map(
                r, stalks[r.source], stalks[r.target], where, problems,
                asserted=(r.source, r.target) in assumed,
            )
            if ring_map is not None:
                restrictions[(r.source, r.target)] = ring_map
        problems.raise_if_any()
        space = problems.attempt(
            "space", RingedSpace, poset, stalks, restrictions, doc.name, assumed
        )
        problems.raise_if_any()
        if self.validate:
            failing = [
                f"square {x} -> {y} -> {z} does not commute" + (f": {error}" if error else "")
                for x, y, z, commutes, error in squares(space)
                if not commutes
            ]
            if failing:
                raise ValidationFailed(f"{origin} is not functorial", failing)
        logger.info("space loaded", origin=origin, points=len(space))
        return space

    def morphism(self, ref: Reference, base_dir: Optional[Path] = None) -> SchematicMorphism:
        content, base, origin = self._content(ref, base_dir)
        doc = _validated(MorphismDocument, content, origin)
        if doc.open_immersion is not None:
            return open_immersion(self.space(doc.target, base), doc.open_immersion)
        if doc.to_point:
            return to_point(self.space(doc.source, base), build_point())
        X = self.space(doc.source, base)
        Y = self.space(doc.target, base)
        problems = Problems(origin)
        comaps = self._comaps(doc.map, doc.comaps, X, Y, "comaps", problems)
        problems.raise_if_any()
        return problems_checked(
            problems, lambda: SchematicMorphism(X, Y, doc.map, comaps, name=doc.name).check()
        )

    def _comaps(
        self,
        mapping: Dict[str, str],
        documents: Dict[str, RingMapDocument],
        X: RingedSpace,
        Y: RingedSpace,
        where: str,
        problems: Problems,
    ) -> Dict[str, RingMap]:
        comaps = {}
        for x in X:
            if x not in mapping:
                problems.items.append(f"{where}: no image for element {x}")
                continue
            y = mapping[x]
            if y not in Y.poset:
                problems.items.append(f"{where}: {y} is not an element of {Y.name}")
                continue
            doc = documents.get(x, RingMapDocument())
            comap = _ring_map(doc, Y.stalk(y), X.stalk(x), f"{where}.{x}", problems)
            if comap is not None:
                comaps[x] = comap
        return comaps

    def datum(self, ref: Reference, base_dir: Optional[Path] = None) -> Datum:
        content, base, origin = self._content(ref, base_dir)
        doc = _validated(DatumDocument, content, origin)
        index = Poset.from_relations(doc.index.elements, doc.index.covers)
        spaces = {p: self.space(doc.spaces[p], base) for p in doc.index.elements}
        problems = Problems(origin)
        transitions = {}
        for t in doc.transitions:
            source, target = spaces[t.upper], spaces[t.lower]
            where = f"transitions.{t.lower}<={t.upper}"
            comaps = self._comaps(t.map, t.comaps, source, target, where, problems)
            morphism = problems.attempt(
                where,
                lambda: SchematicMorphism(source, target, t.map, comaps, name=where).check(),
            )
            transitions[(t.lower, t.upper)] = morphism
        problems.raise_if_any()
        return problems_checked(problems, lambda: Datum(index, spaces, transitions).check())

    def diagram(
        self,
        ref: Reference,
        base_dir: Optional[Path] = None,
        poset: Optional[Poset] = None,
    ) -> FiniteDiagram:
        """A diagram on its own poset or space, or else on the given poset"""
        content, base, origin = self._content(ref, base_dir)
        doc = _validated(DiagramDocument, content, origin)
        if doc.twist is not None:
            return twist_slice(doc.twist.n, doc.twist.degree, doc.twist.floor)
        if doc.poset is not None:
            poset = Poset.from_relations(doc.poset.elements, doc.poset.covers)
        elif doc.space is not None:
            poset = self.space(doc.space, base).poset
        elif poset is None:
            raise DocumentError(f"{origin} names no space or poset for its diagram")
        problems = Problems(origin)
        for name in doc.dims:
            if name not in poset:
                problems.items.append(f"dims: unknown element {name}")
        covers = set(poset.covers())
        maps = {}
        for m in doc.maps:
            where = f"maps.{m.source}->{m.target}"
            if (m.source, m.target) not in covers:
                problems.items.append(f"{where}: not a covering pair")
                continue
            try:
                rows = [[Fraction(x) for x in row] for row in m.matrix]
                cols = len(rows[0]) if rows else doc.dims.get(m.source, 0)
                maps[(m.source, m.target)] = Matrix(len(rows), cols, rows)
            except (ValueError, ZeroDivisionError):
                problems.items.append(f"{where}: malformed matrix")
        problems.raise_if_any()
        return problems_checked(
            problems, lambda: FiniteDiagram(poset, doc.dims, maps).check()
        )

    def suite(self, ref: Reference, X: RingedSpace, base_dir: Optional[Path] = None) -> List[SigmaPoint]:
        content, _, origin = self._content(ref, base_dir)
        doc = _validated(SuiteDocument, content, origin)
        problems = Problems(origin)
        points = []

        def images_of(mapping: Dict[str, str], where: str):
            return {
                v: problems.attempt(f"{where}.{v}", parse_rational_function, text, doc.variable)
                for v, text in mapping.items()
            }

        for i, p in enumerate(doc.points):
            base = None
            if p.base is not None:
                base = BasePoint(p.base.carrier, images_of(p.base.images, f"points.{i}.base"))
            points.append(SigmaPoint(p.carrier, images_of(p.images, f"points.{i}"), base, p.label))
        problems.raise_if_any()

        if doc.random is not None:
            points += random_suite(
                doc.random.carrier,
                doc.random.free,
                doc.random.inverses,
                doc.random.count,
                doc.random.seed,
                doc.random.degree,
            )
        for point in points:
            problems.attempt(f"point {point.describe()}", point.check, X)
        problems.raise_if_any()
        return points

    def covers(self, ref: Reference, base_dir: Optional[Path] = None):
        content, _, origin = self._content(ref, base_dir)
        doc = _validated(CoversDocument, content, origin)
        return doc.first, doc.second


def problems_checked(problems: Problems, build):
    result = problems.attempt("document", build)
    problems.raise_if_any()
    return result


def random_suite(
    carrier: str,
    free: Sequence[str],
    inverses: Dict[str, str],
    count: int,
    seed: int,
    degree: int = 4,
) -> List[SigmaPoint]:
    """Random QQ(t)-points: free variables get random rational functions, inverses their reciprocals"""
    rng = random.Random(seed)
    points = []
    for k in range(count):
        images = {v: random_rational_function(rng, degree) for v in free}
        for v, of in inverses.items():
            images[v] = images[of] ** -1
        points.append(SigmaPoint(carrier, images, label=f"random[{seed}:{k}]"))
    return points


def space_document(X: RingedSpace) -> dict:
    """Canonical mapping for a space: declaration order, normal-form polynomials"""
    elements = {}
    for x in X:
        A = X.stalk(x)
        entry = {"variables": list(A.variables)}
        if A.relations.generators:
            entry["relations"] = [format_polynomial(r) for r in A.relations.generators]
        elements[str(x)] = entry
    restrictions = []
    for x, y in X.edges():
        r = X.cover_map(x, y)
        entry = {
            "from": str(x),
            "to": str(y),
            "images": {v: format_polynomial(i) for v, i in zip(r.source.variables, r.images)},
        }
        if r.certificate is not None:
            c = r.certificate
            entry["certificate"] = {
                "witness": format_polynomial(r.source.element(c.witness)),
                "inverse": format_polynomial(r.target.element(c.inverse)),
                "sections": {
                    v: [format_polynomial(r.source.element(p)), k]
                    for v, (p, k) in c.sections.items()
                },
            }
        restrictions.append(entry)
    document = {
        "kind": "space",
        "name": X.name,
        "elements": elements,
        "covers": [[str(x), str(y)] for x, y in X.edges()],
        "restrictions": restrictions,
    }
    assumed = sorted(X.assumed, key=lambda e: (X.poset.index(e[0]), X.poset.index(e[1])))
    if assumed:
        document["assumed"] = [[str(x), str(y)] for x, y in assumed]
    return document


def emit_space(X: RingedSpace, path: Optional[Path] = None) -> str:
    text = yaml.safe_dump(space_document(X), sort_keys=False, allow_unicode=True)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_space(ref: Reference) -> RingedSpace:
    return DocumentLoader().space(ref)



def bundled_reference(value) -> Reference:
    """Requests may name bundled examples only; inline documents pass as mappings"""
    if isinstance(value, str):
        if value not in bundled_names():
            raise DocumentError(f"no bundled document named {value!r}", {"bundled": bundled_names()})
        return value
    return value.model_dump(by_alias=True, exclude_none=True)
