import pytest
import yaml

from workbench.core.config import settings
from workbench.core.errors import DocumentError, ValidationFailed
from workbench.services.io_service import (
    DocumentLoader,
    bundled_names,
    bundled_reference,
    emit_space,
    load_space,
    resolve,
)


def diamond_document(top_image: str) -> dict:
    elements = {p: {"variables": ["x"]} for p in ["z", "a", "b", "t"]}
    covers = [["z", "a"], ["z", "b"], ["a", "t"], ["b", "t"]]
    restrictions = [
        {"from": lower, "to": upper, "images": {"x": "x"}} for lower, upper in covers[:3]
    ]
    restrictions.append({"from": "b", "to": "t", "images": {"x": top_image}})
    return {
        "kind": "space",
        "name": "diamond",
        "elements": elements,
        "covers": covers,
        "restrictions": restrictions,
    }


class TestBundledDocuments:
    """Examples shipped with the package"""

    def test_names(self):
        names = bundled_names()
        assert "p1_model" in names
        assert "two_chart_no_top" in names

    @pytest.mark.parametrize(
        "name", ["p1_model", "two_chart_no_top", "two_chart_with_top", "point_q", "a1_point"]
    )
    def test_emit_round_trip(self, name):
        original = yaml.safe_load((settings.data_dir / f"{name}.yaml").read_text())
        assert yaml.safe_load(emit_space(load_space(name))) == original

    def test_emit_to_file(self, tmp_path):
        target = tmp_path / "p1.yaml"
        emit_space(load_space("p1_model"), target)
        assert load_space(target).elements == ("p0", "p1", "p01")

    def test_spaces_are_shared(self, loader):
        X = loader.space("p1_model")
        assert loader.space("p1_model") is X
        assert loader.morphism("chart_p0").target is X

    def test_unknown_reference(self):
        with pytest.raises(DocumentError) as info:
            resolve("no_such_space")
        assert "p1_model" in info.value.details["bundled"]

    def test_bundled_reference_rejects_paths(self):
        with pytest.raises(DocumentError):
            bundled_reference("/etc/passwd")


class TestValidation:
    """Load-time checks aggregate every problem"""

    def test_inline_space(self, loader):
        X = loader.space(diamond_document("x"))
        assert len(X) == 4

    def test_non_commuting_square(self, loader):
        with pytest.raises(ValidationFailed) as info:
            loader.space(diamond_document("-x"))
        assert info.value.problems == ["square z -> b -> t does not commute"]
        assert "is not functorial" in str(info.value)

    def test_parse_errors_are_collected(self, loader):
        document = diamond_document("x + q")
        document["elements"]["a"]["relations"] = ["x^"]
        with pytest.raises(ValidationFailed) as info:
            loader.space(document)
        assert info.value.problems == [
            "elements.a.relations: expected a natural exponent at offset 2"
        ]

    def test_bad_image_is_reported(self, loader):
        with pytest.raises(ValidationFailed) as info:
            loader.space(diamond_document("x + q"))
        assert info.value.problems == [
            "restrictions.b->t.images.x: unknown variable 'q' at offset 4"
        ]

    def test_schema_errors(self, loader):
        with pytest.raises(ValidationFailed) as info:
            loader.space({"kind": "space", "covers": [["a", "b"]]})
        assert any(p.startswith("elements") for p in info.value.problems)

    def test_unknown_element_in_cover(self, loader):
        document = diamond_document("x")
        document["covers"].append(["z", "nowhere"])
        with pytest.raises(ValidationFailed):
            loader.space(document)


class TestOtherDocuments:
    """Diagrams, suites and covers"""

    def test_diagram_on_a_bundled_space(self, loader):
        D = loader.diagram("p01_only")
        assert D.dims == {"p0": 0, "p1": 0, "p01": 1}

    def test_diagram_map_on_a_non_cover(self, loader):
        document = {
            "poset": {"elements": ["a", "b", "c"], "covers": [["a", "b"], ["b", "c"]]},
            "dims": {"a": 1, "c": 1},
            "maps": [{"from": "a", "to": "c", "matrix": [[1]]}],
        }
        with pytest.raises(ValidationFailed) as info:
            loader.diagram(document)
        assert info.value.problems == ["maps.a->c: not a covering pair"]

    def test_diagram_needs_a_poset(self, loader):
        with pytest.raises(DocumentError):
            loader.diagram({"dims": {"a": 1}})

    def test_twist_document(self, loader):
        D = loader.diagram("twist_minus_two")
        assert D.dims == {"p0": 0, "p1": 0, "p01": 1}

    def test_suite(self, loader, p1):
        suite = loader.suite("p1_random_suite", p1)
        assert len(suite) == 20
        assert suite[0].label == "random[20240917:0]"

    def test_suite_points_are_checked(self, loader, p1):
        document = {"points": [{"carrier": "p01", "images": {"u": "t", "w": "t"}}]}
        with pytest.raises(ValidationFailed):
            loader.suite(document, p1)

    def test_covers(self, loader):
        first, second = loader.covers("p1_charts")
        assert first == ["p0", "p1"]
        assert second is None
