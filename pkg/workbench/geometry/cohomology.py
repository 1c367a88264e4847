"""Cohomology of finite-dimensional diagrams on finite posets.

A diagram assigns a QQ-vector space V_x to every point and a matrix to every
covering relation x < y (dims(y) x dims(x)). Cohomology is computed from the
complex C^k = (+)_{x_0 < ... < x_k} V_{x_k} with

    (d phi)(x_0 < ... < x_{k+1}) = sum_{i <= k} (-1)^i phi(.. drop x_i ..)
                                   + (-1)^{k+1} rho_{x_k x_{k+1}} phi(x_0 < ... < x_k)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from workbench.algebra.linalg import Matrix, Vector, independent_extension
from workbench.algebra.posets import Element, MonotoneMap, Poset, chains, subsets_poset
from workbench.core.concurrency import parallel_map
from workbench.core.errors import (
    CorruptComplexError,
    DiagramInvalidError,
    DivergenceError,
    WorkbenchError,
)
from workbench.geometry.builders import pn_label

logger = structlog.get_logger(__name__)

Chain = Tuple[Element, ...]


class FiniteDiagram:
    def __init__(
        self,
        poset: Poset,
        dims: Dict[Element, int],
        maps: Dict[Tuple[Element, Element], Matrix],
    ):
        self.poset = poset
        self.dims = {x: int(dims.get(x, 0)) for x in poset}
        if any(d < 0 for d in self.dims.values()):
            raise DiagramInvalidError("negative dimension in diagram")
        self._maps: Dict[Tuple[Element, Element], Matrix] = {}
        for x, y in poset.covers():
            m = maps.get((x, y))
            if m is None:
                m = Matrix.zeros(self.dims[y], self.dims[x])
            if m.shape != (self.dims[y], self.dims[x]):
                raise DiagramInvalidError(
                    f"map {x} -> {y} has shape {m.shape}, expected {(self.dims[y], self.dims[x])}"
                )
            self._maps[(x, y)] = m
        self._composites: Dict[Tuple[Element, Element], Matrix] = {}

    def __repr__(self) -> str:
        return f"FiniteDiagram({self.dims})"

    def map(self, x: Element, z: Element) -> Matrix:
        key = (x, z)
        if key not in self._composites:
            if x == z:
                result = Matrix.identity(self.dims[x])
            else:
                chain = self.poset.covering_chain(x, z)
                result = self._maps[(chain[0], chain[1])]
                for a, b in zip(chain[1:], chain[2:]):
                    result = self._maps[(a, b)] @ result
            self._composites[key] = result
        return self._composites[key]

    def check(self) -> "FiniteDiagram":
        P = self.poset
        for x in P:
            for z in P.up_set(x):
                if x == z or z in P.upper_covers(x):
                    continue
                for y in P.upper_covers(x):
                    if P.le(y, z) and self.map(y, z) @ self.map(x, y) != self.map(x, z):
                        raise DiagramInvalidError(
                            f"square {x} -> {y} -> {z} does not commute",
                            {"lower": str(x), "via": str(y), "upper": str(z)},
                        )
        return self

    def restrict(self, subset: Iterable[Element]) -> "FiniteDiagram":
        sub = self.poset.restrict(subset)
        return FiniteDiagram(
            sub, {x: self.dims[x] for x in sub}, {(x, y): self.map(x, y) for x, y in sub.covers()}
        )


@dataclass
class ChainComplex:
    terms: List[List[Tuple[Chain, int]]]
    differentials: List[Matrix]

    @property
    def dims(self) -> List[int]:
        return [len(t) for t in self.terms]

    def differential(self, k: int) -> Matrix:
        """d^k: C^k -> C^(k+1); zero outside the stored range"""
        dims = self.dims
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        rows = dims[k + 1] if 0 <= k + 1 < len(dims) else 0
        cols = dims[k] if 0 <= k < len(dims) else 0
        return Matrix.zeros(rows, cols)

    def check(self) -> "ChainComplex":
        for k in range(len(self.differentials) - 1):
            if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                raise CorruptComplexError(f"d^{k + 1} d^{k} is not zero")
        return self


@dataclass
class CohomologyTable:
    dims: List[int]
    complex_dims: List[int] = field(default_factory=list)
    representatives: List[List[Vector]] = field(default_factory=list)

    def dim(self, i: int) -> int:
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * h for i, h in enumerate(self.dims))


def diagram_complex(D: FiniteDiagram) -> ChainComplex:
    D.check()
    height = D.poset.height()
    levels = [chains(D.poset, k) for k in range(height + 1)]
    terms = [[(c, j) for c in level for j in range(D.dims[c[-1]])] for level in levels]
    offsets = []
    for level in levels:
        table, pos = {}, 0
        for c in level:
            table[c] = pos
            pos += D.dims[c[-1]]
        offsets.append(table)

    differentials = []
    for k in range(height):
        d = Matrix.zeros(len(terms[k + 1]), len(terms[k]))
        for c in levels[k + 1]:
            row = offsets[k + 1][c]
            top = c[-1]
            for i in range(k + 1):
                face = c[:i] + c[i + 1 :]
                col = offsets[k][face]
                sign = 1 if i % 2 == 0 else -1
                for j in range(D.dims[top]):
                    d.data[row + j][col + j] += sign
            rho = D.map(c[-2], top)
            col = offsets[k][c[:-1]]
            sign = 1 if (k + 1) % 2 == 0 else -1
            for a in range(rho.rows):
                for b in range(rho.cols):
                    if rho.data[a][b]:
                        d.data[row + a][col + b] += sign * rho.data[a][b]
        differentials.append(d)
    return ChainComplex(terms, differentials).check()


def cohomology(C: ChainComplex, representatives: bool = False) -> CohomologyTable:
    C.check()
    dims = C.dims
    table = CohomologyTable(dims=[], complex_dims=list(dims))
    for i in range(len(dims)):
        d_out = C.differential(i)
        d_in = C.differential(i - 1)
        kernel = d_out.nullspace() if dims[i] else []
        rank_in = d_in.rank() if dims[i] and d_in.cols else 0
        table.dims.append(len(kernel) - rank_in)
        if representatives:
            image = [d_in.column(j) for j in range(d_in.cols)] if d_in.cols else []
            table.representatives.append(independent_extension(image, kernel, dims[i]))
    chi = sum((-1) ** k * n for k, n in enumerate(dims))
    if table.euler_characteristic() != chi:
        raise CorruptComplexError("Euler characteristic mismatch")
    return table


def diagram_cohomology(D: FiniteDiagram, representatives: bool = False) -> CohomologyTable:
    return cohomology(diagram_complex(D), representatives)


def euler_characteristic(C: ChainComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(C.dims))


def compatible_sections(D: FiniteDiagram) -> int:
    """dim of {(s_x) : rho_xy s_x = s_y for every cover}, by one linear system"""
    positions, total = {}, 0
    for x in D.poset:
        positions[x] = total
        total += D.dims[x]
    rows = []
    for x, y in D.poset.covers():
        rho = D.map(x, y)
        for a in range(D.dims[y]):
            row = [0] * total
            for b in range(D.dims[x]):
                row[positions[x] + b] = rho.data[a][b]
            row[positions[y] + a] -= 1
            rows.append(row)
    if not total:
        return 0
    if not rows:
        return total
    return len(Matrix.from_rows(rows, total).nullspace())


def pattern_diagram(P: Poset, support: Dict[Element, bool]) -> FiniteDiagram:
    """QQ where support holds (an up-set), identities inside, zero elsewhere"""
    dims = {x: 1 if support[x] else 0 for x in P}
    maps = {
        (x, y): Matrix.identity(1) if support[x] else Matrix.zeros(dims[y], 0)
        for x, y in P.covers()
    }
    return FiniteDiagram(P, dims, maps)


@lru_cache(maxsize=None)
def _pn_poset(n: int) -> Poset:
    return subsets_poset(n, label=pn_label)


@lru_cache(maxsize=None)
def pattern_cohomology(n: int, pattern: Tuple[int, ...]) -> Tuple[int, ...]:
    """h^i of the pattern diagram: QQ on the subsets containing pattern"""
    P = _pn_poset(n)
    members = {pn_label(c): set(c) for size in range(1, n + 2) for c in combinations(range(n + 1), size)}
    D = pattern_diagram(P, {x: set(pattern) <= members[x] for x in P})
    dims = diagram_cohomology(D).dims
    return tuple(dims) + (0,) * (n + 1 - len(dims))


def monomial_count(n: int, d: int, pattern: Tuple[int, ...]) -> Optional[int]:
    """Laurent monomials of degree d in n+1 variables negative exactly on pattern; None if infinite"""
    k = len(pattern)
    if k == 0:
        return comb(n + d, n) if d >= 0 else 0
    if k == n + 1:
        return comb(-d - 1, n) if -d - 1 >= n else 0
    return None


def twist_cohomology(n: int, d: int) -> CohomologyTable:
    """H^i(P^n, O(d)) on the standard model by negative-support decomposition"""
    if n < 1:
        raise WorkbenchError(f"projective models need n >= 1, got {n}")
    totals = [0] * (n + 1)
    for size in range(n + 2):
        for pattern in combinations(range(n + 1), size):
            h = pattern_cohomology(n, pattern)
            count = monomial_count(n, d, pattern)
            if count is None:
                if any(h):
                    raise DivergenceError(
                        f"pattern {pattern} has cohomology {h} and infinitely many monomials",
                        {"pattern": list(pattern)},
                    )
                continue
            for i, value in enumerate(h):
                totals[i] += value * count
    return CohomologyTable(dims=totals)


def twist_diagram(
    n: int, d: int, degree_window: Optional[Sequence[int]] = None
) -> Dict[int, CohomologyTable]:
    degrees = list(degree_window) if degree_window is not None else [d]
    tables = parallel_map(lambda e: twist_cohomology(n, e), degrees)
    logger.info("twist cohomology", n=n, degrees=degrees)
    return dict(zip(degrees, tables))


def _exponent_vectors(count: int, total: int, floor: int) -> List[Tuple[int, ...]]:
    shifted = total - count * floor
    if shifted < 0:
        return []
    result = []
    for bars in combinations(range(shifted + count - 1), count - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(shifted + count - 1 - prev - 1)
        result.append(tuple(p + floor for p in parts))
    return sorted(result)


def twist_slice(n: int, d: int, floor: Optional[int] = None) -> FiniteDiagram:
    """Degree-d slice of O(d) on the P^n model with exponents >= floor.

    The slice is exact for the default floor min(-1, d + n): every monomial
    contributing cohomology lies in the window.
    """
    if floor is None:
        floor = min(-1, d + n)
    P = _pn_poset(n)
    members = {pn_label(c): set(c) for size in range(1, n + 2) for c in combinations(range(n + 1), size)}
    monomials = _exponent_vectors(n + 1, d, floor)
    bases = {
        x: [m for m in monomials if {i for i, e in enumerate(m) if e < 0} <= members[x]]
        for x in P
    }
    maps = {}
    for x, y in P.covers():
        index = {m: r for r, m in enumerate(bases[y])}
        M = Matrix.zeros(len(bases[y]), len(bases[x]))
        for c, m in enumerate(bases[x]):
            M.data[index[m]][c] = 1
        maps[(x, y)] = M
    return FiniteDiagram(P, {x: len(b) for x, b in bases.items()}, maps)


def _induced_map(
    source: CohomologyTable,
    target_complex: ChainComplex,
    target: CohomologyTable,
    projection: List[int],
    i: int,
) -> Matrix:
    """Matrix of H^i(source) -> H^i(target) in the representative bases"""
    reps_src = source.representatives[i]
    reps_tgt = target.representatives[i]
    d_in = target_complex.differential(i - 1)
    image = [d_in.column(j) for j in range(d_in.cols)] if d_in.cols else []
    length = target_complex.dims[i] if i < len(target_complex.dims) else 0
    M = Matrix.zeros(len(reps_tgt), len(reps_src))
    if not reps_tgt or not reps_src:
        return M
    basis = Matrix.from_columns(reps_tgt + image, length)
    for c, v in enumerate(reps_src):
        projected = [v[p] for p in projection]
        solution = basis.solve(projected)
        if solution is None:
            raise CorruptComplexError("projected cocycle is not a cocycle")
        for r in range(len(reps_tgt)):
            M.data[r][c] = solution[r]
    return M


def higher_direct_image(
    f: MonotoneMap, D: FiniteDiagram, max_i: Optional[int] = None
) -> List[FiniteDiagram]:
    """R^i f_* D with stalk H^i(f^{-1}(U_y), D) and maps induced by restriction of cochains"""
    D.check()
    Y = f.target
    top = D.poset.height() if max_i is None else max_i
    fibers = {y: f.fiber_up_set(y) for y in Y}

    def compute(y):
        sub = D.restrict(fibers[y])
        C = diagram_complex(sub)
        return C, cohomology(C, representatives=True)

    computed = dict(zip(Y.elements, parallel_map(compute, list(Y.elements))))
    results = []
    for i in range(top + 1):
        dims = {y: computed[y][1].dim(i) for y in Y}
        maps = {}
        for y, y2 in Y.covers():
            C_src, H_src = computed[y]
            C_tgt, H_tgt = computed[y2]
            if not dims[y] or not dims[y2]:
                maps[(y, y2)] = Matrix.zeros(dims[y2], dims[y])
                continue
            source_terms = {t: idx for idx, t in enumerate(C_src.terms[i])}
            projection = [source_terms[t] for t in C_tgt.terms[i]]
            maps[(y, y2)] = _induced_map(H_src, C_tgt, H_tgt, projection, i)
        results.append(FiniteDiagram(Y, dims, maps).check())
    logger.info("higher direct images", degrees=top + 1, targets=len(Y))
    return results
