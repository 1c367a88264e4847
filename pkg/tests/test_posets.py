import numpy as np
import pytest

from workbench.algebra.posets import (
    MonotoneMap,
    Poset,
    chains,
    check_monotone,
    finite_model_poset,
    minimum,
    subsets_poset,
    up_set,
)
from workbench.core.errors import ElementNotFoundError, PosetError


@pytest.fixture
def vee() -> Poset:
    """p0 < p01 > p1"""
    return Poset.from_relations(["p0", "p1", "p01"], [("p0", "p01"), ("p1", "p01")])


@pytest.fixture
def chain3() -> Poset:
    return Poset.from_relations(["a", "b", "c"], [("a", "b"), ("b", "c")])


class TestPoset:
    """Construction and order queries."""

    def test_transitive_closure(self, chain3):
        """Relations given as covers are closed transitively."""
        assert chain3.le("a", "c")
        assert not chain3.le("c", "a")
        assert chain3.covers() == [("a", "b"), ("b", "c")]

    def test_rejects_cycle(self):
        """A cycle violates antisymmetry."""
        with pytest.raises(PosetError):
            Poset.from_relations(["a", "b"], [("a", "b"), ("b", "a")])

    def test_rejects_duplicates(self):
        with pytest.raises(PosetError):
            Poset(["a", "a"], np.eye(2, dtype=bool))

    def test_unknown_element(self, vee):
        with pytest.raises(ElementNotFoundError):
            vee.le("p0", "q")
        with pytest.raises(ElementNotFoundError):
            Poset.from_relations(["a"], [("a", "b")])

    def test_up_and_down_sets(self, vee):
        assert up_set(vee, "p0") == ["p0", "p01"]
        assert vee.up_set("p01") == ["p01"]
        assert vee.down_set("p01") == ["p0", "p1", "p01"]

    def test_height_and_extremes(self, vee, chain3):
        assert vee.height() == 1
        assert chain3.height() == 2
        assert vee.minimal_elements() == ["p0", "p1"]
        assert vee.maximal_elements() == ["p01"]
        assert vee.minimal_upper_bounds("p0", "p1") == ["p01"]

    def test_covering_chain_is_least(self):
        """Of the two routes a < b < d and a < c < d the first declared wins."""
        P = Poset.from_relations(
            ["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
        )
        assert P.covering_chain("a", "d") == ["a", "b", "d"]
        assert len(P.covering_chains("a", "d")) == 2
        with pytest.raises(PosetError):
            P.covering_chain("d", "a")

    def test_restrict_and_up_closed(self, vee):
        assert vee.is_up_closed(["p0", "p01"])
        assert not vee.is_up_closed(["p0"])
        sub = vee.restrict(["p01", "p0"])
        assert sub.elements == ("p0", "p01")
        assert sub.covers() == [("p0", "p01")]


class TestChains:
    """Strict chains x0 < ... < xk."""

    def test_vee_chains(self, vee):
        assert chains(vee, 0) == [("p0",), ("p1",), ("p01",)]
        assert chains(vee, 1) == [("p0", "p01"), ("p1", "p01")]
        assert chains(vee, 2) == []

    def test_negative_length(self, vee):
        assert chains(vee, -1) == []

    def test_chain_counts_on_total_order(self, chain3):
        """A total order on 3 elements has C(3, k+1) chains of length k."""
        assert [len(chains(chain3, k)) for k in range(3)] == [3, 3, 1]


class TestMinimum:
    def test_minimum(self, vee, chain3):
        assert minimum(chain3, ["b", "c"]) == "b"
        assert minimum(vee, ["p0", "p1"]) is None
        assert minimum(vee, []) is None


class TestMonotone:
    def test_constant_map_is_monotone(self, vee, chain3):
        m = MonotoneMap(vee, chain3, {"p0": "a", "p1": "a", "p01": "a"})
        assert check_monotone(m)
        assert m.fiber_up_set("a") == ["p0", "p1", "p01"]
        assert m.fiber_up_set("b") == []

    def test_order_reversing_map(self, vee, chain3):
        m = MonotoneMap(vee, chain3, {"p0": "c", "p1": "a", "p01": "b"})
        assert not check_monotone(m)

    def test_partial_assignment(self, vee, chain3):
        with pytest.raises(ElementNotFoundError):
            MonotoneMap(vee, chain3, {"p0": "a"})


class TestSubsetPosets:
    """Nonempty subsets and the finite-model quotient."""

    def test_subsets_poset_sizes(self):
        assert len(subsets_poset(1)) == 3
        assert len(subsets_poset(2)) == 7
        P = subsets_poset(2)
        assert P.le((0,), (0, 1, 2))
        assert not P.le((0, 1), (1, 2))

    def test_finite_model_of_two_chart_cover(self):
        """Points of P^1 have membership patterns {0}, {1}, {0, 1}."""
        P = finite_model_poset([[0], [1], [0, 1], [1, 0], [0]])
        assert P.elements == ((0,), (1,), (0, 1))
        assert P.covers() == [((0,), (0, 1)), ((1,), (0, 1))]
