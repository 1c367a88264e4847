import pytest

from workbench.algebra.posets import Poset
from workbench.algebra.rings import PresentedRing, RingMap, identity
from workbench.core.errors import AffinenessUnverifiableError, ConstructionError, FunctorialityError
from workbench.geometry.builders import build_affine, build_point
from workbench.geometry.morphisms import (
    SchematicMorphism,
    affine_report,
    check_central,
    fiber_minimum,
    global_sections,
    is_affine,
    is_affine_morphism,
    open_immersion,
    to_point,
)
from workbench.geometry.spaces import PrimePoint, RingedSpace


@pytest.fixture
def chart_into_p1(p1) -> SchematicMorphism:
    """Spec QQ[u] sent to the closed point p0 of P1"""
    A = PresentedRing(["u"])
    pt = build_point(A, name="A1")
    comap = RingMap(p1.stalk("p0"), A, [A.gens["u"]])
    return SchematicMorphism(pt, p1, {"pt": "p0"}, {"pt": comap}, name="j")


class TestSchematicMorphism:
    """Monotone maps with commuting comaps"""

    def test_identity_and_composition(self, p1, point):
        f = open_immersion(p1, "p0").check()
        g = to_point(p1, point).check()
        h = f.compose(g).check()
        assert h.target is point
        assert [h(x) for x in h.source] == ["pt", "pt"]
        assert SchematicMorphism.identity(p1).check().fiber("p0") == ["p0", "p01"]

    def test_not_monotone(self, p1):
        mapping = {"p0": "p01", "p1": "p1", "p01": "p0"}
        comaps = {x: identity(p1.stalk(x)) for x in p1}
        with pytest.raises(ConstructionError):
            SchematicMorphism(p1, p1, mapping, comaps)

    def test_failing_square(self, qx):
        poset = Poset.from_relations(["a", "b"], [("a", "b")])
        X = RingedSpace(poset, {"a": qx, "b": qx}, {("a", "b"): identity(qx)})
        doubled = RingMap(qx, qx, [2 * qx.gens["x"]])
        f = SchematicMorphism(
            X, X, {"a": "a", "b": "b"}, {"a": identity(qx), "b": doubled}, name="f"
        )
        assert f.square_problems() == ["square at a -> b fails on x"]
        with pytest.raises(FunctorialityError):
            f.check()

    def test_to_point_needs_rational_base(self, p1):
        with pytest.raises(ConstructionError):
            to_point(p1, build_point(PresentedRing(["t"])))


class TestAffineness:
    """Minimum-element criterion"""

    def test_p1_is_not_affine(self, p1):
        assert not is_affine(p1)
        report = affine_report(p1)
        assert report.verdict is False
        assert report.lines == ["no minimum element; affineness is unverifiable by the criterion"]
        with pytest.raises(AffinenessUnverifiableError):
            global_sections(p1)

    def test_chart_is_affine(self, p1):
        U = p1.open_subspace("p0")
        assert is_affine(U)
        assert global_sections(U) is p1.stalk("p0")

    def test_distinguished_cover_model(self, qx):
        x = qx.gens["x"]
        A = build_affine(qx, [x, x - 1])
        assert len(A) == 4
        assert affine_report(A).verdict is True

    def test_affine_morphisms(self, p1, point):
        assert is_affine_morphism(open_immersion(p1, "p0")).verdict is True
        report = is_affine_morphism(to_point(p1, point))
        assert report.verdict is False
        assert report.lines == ["preimage of U_pt has no minimum"]
        assert fiber_minimum(open_immersion(p1, "p0"), "p1") == "p01"
        with pytest.raises(AffinenessUnverifiableError):
            fiber_minimum(to_point(p1, point), "pt")


class TestCentrality:
    """Sampled centre-to-centre test"""

    def test_identity_is_central(self, p1):
        u = p1.stalk("p0").gens["u"]
        tests = [PrimePoint.of(p1, "p0", []), PrimePoint.of(p1, "p0", [u])]
        report = check_central(SchematicMorphism.identity(p1), tests)
        assert report.verdict is True

    def test_closed_point_into_a_chart_is_not_central(self, chart_into_p1):
        tests = [PrimePoint.of(chart_into_p1.source, "pt", [])]
        report = check_central(chart_into_p1, tests)
        assert report.verdict is False
        assert report.lines == ["(0) at pt: f(centre) = p0 but the target centre is p01"]
