"""Finite posets stored as dense boolean order matrices.

Open sets are up-sets: the minimal open set of ``x`` is ``U_x = {y : x <= y}``,
so restriction maps run upward along the order.
"""

from itertools import combinations
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from workbench.core.errors import ElementNotFoundError, PosetError

logger = structlog.get_logger(__name__)

Element = Hashable


class Poset:
    """A finite partial order; iteration follows declaration order"""

    def __init__(self, elements: Sequence[Element], leq: np.ndarray):
        self.elements: Tuple[Element, ...] = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise PosetError("duplicate element identifiers")
        self._index: Dict[Element, int] = {e: i for i, e in enumerate(self.elements)}
        self.leq = np.array(leq, dtype=bool)
        self.leq.setflags(write=False)
        self._check_order()
        self._covers: Optional[List[Tuple[Element, Element]]] = None

    @classmethod
    def from_relations(
        cls, elements: Sequence[Element], relations: Iterable[Tuple[Element, Element]]
    ) -> "Poset":
        """Build the reflexive-transitive closure of the given pairs x <= y"""
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for x, y in relations:
            if x not in index or y not in index:
                missing = x if x not in index else y
                raise ElementNotFoundError(f"unknown element {missing!r}")
            leq[index[x], index[y]] = True
        # Warshall closure
        for k in range(n):
            leq |= np.outer(leq[:, k], leq[k, :])
        return cls(elements, leq)

    @classmethod
    def from_order(
        cls, elements: Sequence[Element], le: Callable[[Element, Element], bool]
    ) -> "Poset":
        elements = list(elements)
        leq = np.array([[le(x, y) for y in elements] for x in elements], dtype=bool)
        return cls(elements, leq.reshape(len(elements), len(elements)))

    def _check_order(self):
        n = len(self.elements)
        if self.leq.shape != (n, n):
            raise PosetError("order matrix does not match the element list")
        if not self.leq.diagonal().all():
            raise PosetError("order is not reflexive")
        both = self.leq & self.leq.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = map(int, np.argwhere(both)[0])
            raise PosetError(
                "order is not antisymmetric",
                {"pair": [str(self.elements[i]), str(self.elements[j])]},
            )
        composed = (self.leq.astype(np.int64) @ self.leq.astype(np.int64)) > 0
        if (composed & ~self.leq).any():
            raise PosetError("order is not transitive")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __repr__(self) -> str:
        return f"Poset({list(self.elements)!r})"

    def index(self, x: Element) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise ElementNotFoundError(f"unknown element {x!r}", {"element": str(x)})

    def le(self, x: Element, y: Element) -> bool:
        return bool(self.leq[self.index(x), self.index(y)])

    def lt(self, x: Element, y: Element) -> bool:
        return x != y and self.le(x, y)

    def sort(self, subset: Iterable[Element]) -> List[Element]:
        """Return the subset in declaration order"""
        return sorted(set(subset), key=self.index)

    def up_set(self, x: Element) -> List[Element]:
        row = self.leq[self.index(x)]
        return [self.elements[j] for j in np.flatnonzero(row)]

    def down_set(self, x: Element) -> List[Element]:
        col = self.leq[:, self.index(x)]
        return [self.elements[i] for i in np.flatnonzero(col)]

    def covers(self) -> List[Tuple[Element, Element]]:
        """Covering relations x < y with nothing strictly between"""
        if self._covers is None:
            strict = self.leq.copy()
            np.fill_diagonal(strict, False)
            two_step = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
            cover = strict & ~two_step
            self._covers = [
                (self.elements[i], self.elements[j]) for i, j in np.argwhere(cover)
            ]
        return list(self._covers)

    def upper_covers(self, x: Element) -> List[Element]:
        return [y for (a, y) in self.covers() if a == x]

    def lower_covers(self, y: Element) -> List[Element]:
        return [a for (a, b) in self.covers() if b == y]

    def covering_chain(self, x: Element, z: Element) -> List[Element]:
        """Lexicographically least chain of covering relations from x up to z"""
        if not self.le(x, z):
            raise PosetError(f"{x!r} is not below {z!r}")
        chain = [x]
        while chain[-1] != z:
            step = next(y for y in self.upper_covers(chain[-1]) if self.le(y, z))
            chain.append(step)
        return chain

    def covering_chains(self, x: Element, z: Element) -> List[List[Element]]:
        """Every chain of covering relations from x up to z"""
        if x == z:
            return [[x]]
        return [
            [x] + rest
            for y in self.upper_covers(x)
            if self.le(y, z)
            for rest in self.covering_chains(y, z)
        ]

    def height(self) -> int:
        """Length of the longest strict chain"""
        depth = {}
        for x in self._linear_extension():
            below = [depth[y] for y in self.lower_covers(x)]
            depth[x] = 1 + max(below) if below else 0
        return max(depth.values(), default=0)

    def _linear_extension(self) -> List[Element]:
        return sorted(self.elements, key=lambda e: len(self.down_set(e)))

    def minimal_elements(self, subset: Optional[Iterable[Element]] = None) -> List[Element]:
        subset = self.sort(self.elements if subset is None else subset)
        return [x for x in subset if not any(self.lt(y, x) for y in subset)]

    def maximal_elements(self, subset: Optional[Iterable[Element]] = None) -> List[Element]:
        subset = self.sort(self.elements if subset is None else subset)
        return [x for x in subset if not any(self.lt(x, y) for y in subset)]

    def minimal_upper_bounds(self, x: Element, y: Element) -> List[Element]:
        common = set(self.up_set(x)) & set(self.up_set(y))
        return self.minimal_elements(common)

    def is_up_closed(self, subset: Iterable[Element]) -> bool:
        subset = set(subset)
        return all(set(self.up_set(x)) <= subset for x in subset)

    def restrict(self, subset: Iterable[Element]) -> "Poset":
        """The induced order on a subset"""
        kept = self.sort(subset)
        idx = [self.index(x) for x in kept]
        return Poset(kept, self.leq[np.ix_(idx, idx)])


class MonotoneMap:
    """An assignment between posets, checked with check_monotone"""

    def __init__(self, source: Poset, target: Poset, assignment: Dict[Element, Element]):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        for x in source:
            if x not in self.assignment:
                raise ElementNotFoundError(
                    f"assignment is not defined on {x!r}", {"element": str(x)}
                )
            target.index(self.assignment[x])

    def __call__(self, x: Element) -> Element:
        return self.assignment[x]

    def preimage(self, subset: Iterable[Element]) -> List[Element]:
        subset = set(subset)
        return [x for x in self.source if self.assignment[x] in subset]

    def fiber_up_set(self, y: Element) -> List[Element]:
        """f^{-1}(U_y)"""
        return self.preimage(self.target.up_set(y))


def up_set(P: Poset, x: Element) -> List[Element]:
    return P.up_set(x)


def chains(P: Poset, k: int) -> List[Tuple[Element, ...]]:
    """Strictly increasing (k+1)-tuples in lexicographic order of indices"""
    if k < 0:
        return []
    n = len(P)
    strict = P.leq.copy()
    np.fill_diagonal(strict, False)
    result: List[Tuple[int, ...]] = [(i,) for i in range(n)]
    for _ in range(k):
        result = [
            c + (int(j),) for c in result for j in np.flatnonzero(strict[c[-1]])
        ]
        if not result:
            break
    result.sort()
    return [tuple(P.elements[i] for i in c) for c in result]


def minimum(P: Poset, subset: Iterable[Element]) -> Optional[Element]:
    subset = P.sort(subset)
    for s in subset:
        if all(P.le(s, t) for t in subset):
            return s
    return None


def check_monotone(m: MonotoneMap) -> bool:
    for x, y in m.source.covers():
        if not m.target.le(m(x), m(y)):
            logger.debug("monotonicity fails", lower=str(x), upper=str(y))
            return False
    return True


def subsets_poset(n: int, label: Callable[[Tuple[int, ...]], Element] = None) -> Poset:
    """Nonempty subsets of {0..n} ordered by inclusion, smaller subsets first"""
    indices = range(n + 1)
    subsets = [c for size in range(1, n + 2) for c in combinations(indices, size)]
    label = label or (lambda c: c)
    return Poset.from_order(
        [label(c) for c in subsets],
        _subset_order(dict(zip([label(c) for c in subsets], subsets))),
    )


def _subset_order(lookup: Dict[Element, Tuple[int, ...]]):
    def le(x, y):
        return set(lookup[x]) <= set(lookup[y])

    return le


def finite_model_poset(
    patterns: Iterable[Iterable[int]], label: Callable[[Tuple[int, ...]], Element] = None
) -> Poset:
    """Quotient of a covered space by its membership patterns.

    Each point s of a space covered by opens U_1..U_m determines the pattern
    {i : s in U_i}; [s] <= [s'] iff every U_i containing s also contains s'.
    """
    distinct = sorted({tuple(sorted(set(p))) for p in patterns}, key=lambda p: (len(p), p))
    label = label or (lambda p: p)
    lookup = {label(p): p for p in distinct}
    return Poset.from_order(list(lookup), _subset_order(lookup))
