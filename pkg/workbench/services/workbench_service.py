from pathlib import Path
from typing import List, Optional, Sequence, Union

from workbench.algebra.posets import Poset
from workbench.core.errors import DiagramInvalidError, WorkbenchError
from workbench.core.logging import LoggingMixin
from workbench.geometry.cohomology import (
    FiniteDiagram,
    compatible_sections,
    diagram_cohomology,
    diagram_complex,
    higher_direct_image,
    twist_diagram,
)
from workbench.geometry.constructions import (
    cylinder,
    fibered_product,
    is_covering,
    nerve,
    open_cover_family,
)
from workbench.geometry.criteria import (
    is_closed_immersion,
    is_separated,
    prolocal_fp_check,
    prolocal_proper_report,
    v_proper_report,
)
from workbench.geometry.morphisms import affine_report
from workbench.geometry.spaces import (
    PrimePoint,
    RingedSpace,
    centre_report,
    check_schematic,
    validate_space,
)
from workbench.models.reports import GRADED_SURROGATE_NOTE, Qualifier, Report
from workbench.services.io_service import DocumentLoader
from workbench.services.parser import parse_polynomial

Reference = Union[str, Path, dict]


def split_list(text: str) -> List[str]:
    """'p0, p1' -> ['p0', 'p1']; empty items are dropped"""
    return [item.strip() for item in text.split(",") if item.strip()]


def _same_order(P: Poset, Q: Poset) -> bool:
    if set(P.elements) != set(Q.elements):
        return False
    return all(P.le(x, y) == Q.le(x, y) for x in P for y in P)


def _space_lines(report: Report, X: RingedSpace) -> None:
    for x in X:
        report.lines.append(f"{x}: {X.stalk(x)!r}")
    for x, y in X.edges():
        report.lines.append(f"{x} < {y}: {X.cover_map(x, y)!r}")


class WorkbenchService(LoggingMixin):
    """One method per command; every method returns a Report"""

    def loader(self) -> DocumentLoader:
        return DocumentLoader()

    def validate(self, space: Reference) -> Report:
        X = self.loader().space(space)
        report = validate_space(X)
        self.logger.info("validate finished", space=X.name, verdict=report.verdict)
        return report

    def schematic(self, space: Reference) -> Report:
        X = self.loader().space(space)
        validation = validate_space(X)
        if not validation.verdict:
            report = Report(command="schematic", subject=X.name, verdict=False)
            report.lines.append("space is not pseudoschematic; run validate for details")
            report.lines += validation.lines
            return report
        report = check_schematic(X)
        if Qualifier.ASSUMED in validation.qualifiers:
            report.qualify(Qualifier.ASSUMED)
        self.logger.info("schematic finished", space=X.name, verdict=report.verdict)
        return report

    def centre(self, space: Reference, at: str, prime: str) -> Report:
        X = self.loader().space(space)
        variables = X.stalk(at).variables
        generators = [parse_polynomial(g, variables) for g in split_list(prime)]
        return centre_report(X, PrimePoint.of(X, at, generators))

    def product(self, f: Reference, g: Reference) -> Report:
        loader = self.loader()
        first, second = loader.morphism(f), loader.morphism(g)
        space, pr1, pr2 = fibered_product(first, second)
        report = Report(command="product", subject=space.name)
        for p in space:
            report.add_row(point=p, variables=list(space.stalk(p).variables))
        _space_lines(report, space)
        broken = pr1.square_problems() + pr2.square_problems()
        report.lines += [f"projection square fails: {b}" for b in broken]
        report.add_row(points=len(space), projections_commute=not broken)
        schematic = check_schematic(space).verdict
        report.add_row(schematic=schematic)
        report.lines.append(f"schematic (recomputed): {schematic}")
        report.data["space"] = space
        return report

    def cylinder(self, datum: Reference) -> Report:
        D = self.loader().datum(datum)
        space = cylinder(D)
        validation = validate_space(space)
        report = Report(command="cylinder", subject=space.name)
        report.qualifiers = list(validation.qualifiers)
        for p, size in D.sizes().items():
            report.add_row(entry=p, points=size)
        report.add_row(points=len(space), pseudoschematic=validation.verdict)
        _space_lines(report, space)
        report.data["space"] = space
        return report

    def nerve(self, space: Reference, cover: Sequence[str]) -> Report:
        X = self.loader().space(space)
        result = nerve(open_cover_family(X, cover))
        report = Report(command="nerve", subject=X.name)
        for entry, size in result.datum.sizes().items():
            report.add_row(entry=entry, points=size)
        total = len(cylinder(result.datum))
        report.add_row(cylinder_points=total, qc_isomorphism=result.qc_isomorphism)
        report.lines.append(f"cylinder has {total} points")
        report.lines.append(
            f"augmentation Cyl -> {X.name}: "
            + ("qc-isomorphism" if result.qc_isomorphism else "not a qc-isomorphism (not a covering)")
        )
        for member, flag in zip(result.family.members, result.diagonal_flags):
            report.add_row(member=member.name, diagonal_qc_trivial=flag)
        report.qualify(Qualifier.CRITERION)
        report.data["nerve"] = result
        return report

    def covering(self, space: Reference, cover: Sequence[str]) -> Report:
        X = self.loader().space(space)
        report = is_covering(open_cover_family(X, cover))
        report.lines.insert(0, f"family U_{{{', '.join(cover)}}}")
        return report

    def cohomology_pn(self, n: int, twist: int, window: Optional[Sequence[int]] = None) -> Report:
        degrees = list(window) if window else [twist]
        tables = twist_diagram(n, twist, degree_window=degrees)
        report = Report(command="cohomology", subject=f"P{n}")
        for d, table in tables.items():
            for i in range(n + 1):
                report.add_row(degree=d, i=i, dim=table.dim(i))
                report.lines.append(f"({d}, {i}, {table.dim(i)})")
        report.data["tables"] = tables
        return report

    def cohomology_diagram(self, space: Reference, diagram: Reference) -> Report:
        loader = self.loader()
        X = loader.space(space)
        D = loader.diagram(diagram, poset=X.poset)
        self._require_on(D, X.poset, X.name)
        table = diagram_cohomology(D)
        oracle = compatible_sections(D)
        report = Report(command="cohomology", subject=X.name)
        for i, h in enumerate(table.dims):
            report.add_row(i=i, dim=h)
            report.lines.append(f"H^{i} = {h}")
        complex_dims = diagram_complex(D).dims
        report.lines.append(f"cochain dimensions {complex_dims}")
        report.lines.append(f"euler characteristic {table.euler_characteristic()}")
        if oracle != table.dim(0):
            raise WorkbenchError(
                f"H^0 = {table.dim(0)} disagrees with {oracle} compatible sections"
            )
        report.data["table"] = table
        return report

    def pushforward(self, morphism: Reference, diagram: Reference, max_i: Optional[int] = None) -> Report:
        loader = self.loader()
        f = loader.morphism(morphism)
        D = loader.diagram(diagram, poset=f.source.poset)
        self._require_on(D, f.source.poset, f.source.name)
        images = higher_direct_image(f.map, D, max_i)
        report = Report(command="pushforward", subject=f.name).qualify(Qualifier.GRADED_SURROGATE)
        for i, R in enumerate(images):
            for y in f.target:
                report.add_row(i=i, y=y, dim=R.dims[y])
            report.lines.append(
                f"R^{i}: " + ", ".join(f"{y}={R.dims[y]}" for y in f.target)
            )
        report.notes.append(GRADED_SURROGATE_NOTE)
        report.data["images"] = images
        return report

    def vproper(self, morphism: Reference, suite: Reference) -> Report:
        loader = self.loader()
        f = loader.morphism(morphism)
        return v_proper_report(f, loader.suite(suite, f.source))

    def prolocal_fp(self, morphism: Reference, covers: Reference) -> Report:
        loader = self.loader()
        f = loader.morphism(morphism)
        first, second = loader.covers(covers)
        U = open_cover_family(f.source, first)
        return prolocal_fp_check(f, U, second)

    def prolocal_proper(self, morphism: Reference, covers: Reference, suite: Reference) -> Report:
        loader = self.loader()
        f = loader.morphism(morphism)
        first, second = loader.covers(covers)
        U = open_cover_family(f.source, first)
        return prolocal_proper_report(f, U, second, loader.suite(suite, f.source))

    def separated(self, morphism: Reference) -> Report:
        return is_separated(self.loader().morphism(morphism))

    def closed_immersion(self, morphism: Reference) -> Report:
        return is_closed_immersion(self.loader().morphism(morphism))

    def affine(self, space: Reference) -> Report:
        return affine_report(self.loader().space(space))

    @staticmethod
    def _require_on(D: FiniteDiagram, P: Poset, name: str) -> None:
        if not _same_order(D.poset, P):
            raise DiagramInvalidError(f"diagram is not indexed by the poset of {name}")


workbench_service = WorkbenchService()
