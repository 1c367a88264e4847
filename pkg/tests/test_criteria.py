import pytest

from workbench.algebra.ratfunc import RationalFunction
from workbench.algebra.rings import PresentedRing, RingMap
from workbench.core.errors import AffinenessUnverifiableError, RingMapError, WorkbenchError
from workbench.geometry.builders import build_point
from workbench.geometry.constructions import FlatImmersionFamily, open_cover_family
from workbench.geometry.criteria import (
    SigmaPoint,
    ascend,
    is_closed_immersion,
    is_separated,
    prolocal_fp_check,
    prolocal_proper_report,
    v_lifts,
    v_proper_report,
)
from workbench.geometry.morphisms import SchematicMorphism, open_immersion, to_point
from workbench.geometry.spaces import check_schematic
from workbench.models.reports import Qualifier
from workbench.services.io_service import random_suite


@pytest.fixture
def t() -> RationalFunction:
    return RationalFunction.t()


class TestValuative:
    """Lifts of QQ(t)-points to QQ[t]_(t)-points"""

    def test_ascend_to_the_generic_stalk(self, p1, t):
        top, images = ascend(p1, SigmaPoint("p0", {"u": t}))
        assert top == "p01"
        assert images["w"] == t**-1

    def test_one_lift_through_the_chart(self, p1, t):
        lifts = v_lifts(p1, SigmaPoint("p01", {"u": t, "w": t**-1}))
        assert [lift.carrier for lift in lifts] == ["p0"]
        assert lifts[0].centre == "p0"
        assert lifts[0].points("closed") == "p0"
        assert lifts[0].points("generic") == "p01"

    def test_relations_are_checked(self, p1, t):
        with pytest.raises(RingMapError, match="violates a relation"):
            SigmaPoint("p01", {"u": t, "w": t}).check(p1)

    def test_random_suite_on_p1(self, p1, point):
        suite = random_suite("p01", ["u"], {"w": "u"}, count=20, seed=20240917, degree=4)
        report = v_proper_report(to_point(p1, point), suite)
        assert report.data["counts"] == [1] * 20
        assert report.verdict is True
        assert report.qualifiers == [Qualifier.SAMPLED]
        assert "v-proper on suite: True" in report.lines

    def test_affine_line_is_not_proper(self, loader, point, t):
        A1 = loader.space("a1_point")
        f = to_point(A1, point)
        report = v_proper_report(f, [SigmaPoint("pt", {"x": t**-1}, label="x -> 1/t")])
        assert report.verdict is False
        assert report.lines[0] == "x -> 1/t: 0 lift(s)"
        assert report.data["separated"] is True
        assert len(v_lifts(A1, SigmaPoint("pt", {"x": t}))) == 1


class TestClosedImmersions:
    """Surjectivity at the minimum of every preimage"""

    def test_identity(self, p1):
        assert is_closed_immersion(SchematicMorphism.identity(p1)).verdict is True

    def test_open_chart_is_not_closed(self, p1):
        report = is_closed_immersion(open_immersion(p1, "p0"))
        assert report.verdict is False
        assert report.data["failing"] == ["p1"]
        assert "p1: O_p1 -> O_p01 is not surjective" in report.lines

    def test_origin_of_the_affine_line(self, loader):
        A1 = loader.space("a1_point")
        origin = build_point()
        comap = RingMap(A1.stalk("pt"), origin.stalk("pt"), [origin.stalk("pt").element(0)])
        f = SchematicMorphism(origin, A1, {"pt": "pt"}, {"pt": comap}, name="origin")
        assert is_closed_immersion(f).verdict is True


class TestSeparated:
    """Diagonal is a closed immersion"""

    def test_p1_over_the_point(self, p1, point):
        report = is_separated(to_point(p1, point))
        assert report.verdict is True
        assert report.lines[0] == "diagonal into 9-point product"

    def test_open_immersion(self, p1):
        assert is_separated(open_immersion(p1, "p0")).verdict is True


class TestProlocalFinitePresentation:
    """Two-level covering criterion"""

    def test_chart_cover(self, p1, point):
        f = to_point(p1, point)
        report = prolocal_fp_check(f, open_cover_family(p1, ["p0", "p1"]))
        assert report.verdict is True
        assert report.lines[-1] == "pro-locally of finite presentation: criterion satisfied"
        assert report.data["separated"] == (True, True)

    def test_single_chart(self, p1, point):
        f = to_point(p1, point)
        report = prolocal_fp_check(f, open_cover_family(p1, ["p0"]))
        assert report.verdict is False
        assert "U does not cover P1: fails at ['p1']" in report.lines

    def test_members_need_a_minimum(self, p1, point):
        family = FlatImmersionFamily(p1, [SchematicMorphism.identity(p1)])
        with pytest.raises(AffinenessUnverifiableError):
            prolocal_fp_check(to_point(p1, point), family)

    def test_second_level_lengths(self, p1, point):
        f = to_point(p1, point)
        with pytest.raises(WorkbenchError, match="second-level"):
            prolocal_fp_check(f, open_cover_family(p1, ["p0", "p1"]), [None])


class TestProlocallyProper:
    """Finite presentation, separatedness and sampled lifts together"""

    def test_projective_line(self, p1, point):
        f = to_point(p1, point)
        suite = random_suite("p01", ["u"], {"w": "u"}, count=5, seed=20240917, degree=3)
        report = prolocal_proper_report(f, open_cover_family(p1, ["p0", "p1"]), None, suite)
        assert report.verdict is True
        assert report.qualifiers == [Qualifier.CRITERION, Qualifier.SAMPLED]
        assert [row["holds"] for row in report.rows] == [True, True, True]

    def test_affine_line_fails_the_valuative_part(self, loader, point, t):
        A1 = loader.space("a1_point")
        f = to_point(A1, point)
        suite = [SigmaPoint("pt", {"x": t**-1}, label="x -> 1/t")]
        report = prolocal_proper_report(f, open_cover_family(A1, ["pt"]), None, suite)
        assert report.verdict is False
        assert report.rows[2] == {"check": "v-proper", "holds": False}
        assert "x -> 1/t: 0 lift(s)" in report.lines


def unit_twist(sigma: SigmaPoint, variable: str, inverse: str, unit: RationalFunction) -> SigmaPoint:
    images = dict(sigma.images)
    images[variable] = images[variable] * unit
    images[inverse] = images[inverse] * unit**-1
    return SigmaPoint(sigma.carrier, images, label=f"{sigma.describe()} * unit")


class TestLiftInvariance:
    """Lift counts do not change when sigma is twisted by a unit of QQ[t]_(t)"""

    def test_projective_line(self, p1, rng, t):
        suite = random_suite("p01", ["u"], {"w": "u"}, count=10, seed=20240917, degree=3)
        for sigma in suite:
            unit = RationalFunction.constant(rng.choice([1, 2, -3])) + t * RationalFunction.constant(
                rng.randint(-3, 3)
            )
            twisted = unit_twist(sigma, "u", "w", unit)
            assert len(v_lifts(p1, twisted)) == len(v_lifts(p1, sigma)), sigma.describe()

    def test_doubled_origin(self, loader, t):
        X = loader.space("doubled_origin")
        sigma = SigmaPoint("c", {"x": t, "w": t**-1})
        unit = RationalFunction.constant(1) + t
        assert len(v_lifts(X, unit_twist(sigma, "x", "w", unit))) == len(v_lifts(X, sigma)) == 2


class TestDoubledOrigin:
    """Two copies of the affine line glued away from the origin"""

    def test_schematic_but_not_separated(self, loader, point):
        X = loader.space("doubled_origin")
        assert check_schematic(X).verdict is True
        report = is_separated(to_point(X, point))
        assert report.verdict is False
        assert report.exit_code == 1

    def test_two_lifts(self, loader, t):
        X = loader.space("doubled_origin")
        lifts = v_lifts(X, SigmaPoint("c", {"x": t, "w": t**-1}))
        assert sorted((lift.carrier, lift.centre) for lift in lifts) == [("a", "a"), ("b", "b")]

    def test_not_v_separated(self, loader, point, t):
        X = loader.space("doubled_origin")
        report = v_proper_report(to_point(X, point), [SigmaPoint("c", {"x": t, "w": t**-1})])
        assert report.data["counts"] == [2]
        assert report.data["separated"] is False
        assert report.verdict is False


class TestSeparatedBoundsLifts:
    """A separated morphism has at most one lift per sampled point"""

    def test_projective_line(self, p1, point):
        f = to_point(p1, point)
        assert is_separated(f).verdict is True
        suite = random_suite("p01", ["u"], {"w": "u"}, count=20, seed=20240917, degree=4)
        assert all(c <= 1 for c in v_proper_report(f, suite).data["counts"])

    def test_doubled_origin_counts(self, loader):
        X = loader.space("doubled_origin")
        suite = random_suite("c", ["x"], {"w": "x"}, count=20, seed=20240917, degree=4)
        for sigma in suite:
            v = sigma.images["x"].valuation()
            expected = 2 if v > 0 else (1 if v == 0 else 0)
            assert len(v_lifts(X, sigma)) == expected, sigma.describe()


class TestClosedImmersionComposition:
    """Composites of closed immersions are closed immersions"""

    def test_points_into_the_plane(self, rng):
        line = build_point(PresentedRing(["x"]), name="A1")
        plane = build_point(PresentedRing(["x", "y"]), name="A2")
        A, B = line.stalk("pt"), plane.stalk("pt")
        for _ in range(5):
            c, k = rng.randint(-3, 3), rng.randint(1, 2)
            target = build_point()
            Q = target.stalk("pt")
            origin = SchematicMorphism(
                target, line, {"pt": "pt"}, {"pt": RingMap(A, Q, [Q.element(c)])}
            )
            axis = SchematicMorphism(
                line, plane, {"pt": "pt"}, {"pt": RingMap(B, A, [A.gens["x"], A.gens["x"] ** k])}
            )
            assert is_closed_immersion(origin).verdict is True
            assert is_closed_immersion(axis).verdict is True
            assert is_closed_immersion(origin.compose(axis)).verdict is True

    def test_open_chart_stays_open(self, p1):
        chart = open_immersion(p1, "p0")
        assert is_closed_immersion(chart.compose(SchematicMorphism.identity(p1))).verdict is False
