"""The standard example spaces."""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

from workbench.algebra.polynomials import fresh_name
from workbench.algebra.posets import Poset, subsets_poset
from workbench.algebra.rings import LocalizationCertificate, PresentedRing, RingMap
from workbench.core.errors import DegenerateLocalizationError, WorkbenchError
from workbench.geometry.spaces import RingedSpace


def build_point(ring: Optional[PresentedRing] = None, name: str = "pt") -> RingedSpace:
    ring = ring if ring is not None else PresentedRing([])
    return RingedSpace(Poset(["pt"], [[True]]), {"pt": ring}, {}, name=name)


def pn_label(subset: Tuple[int, ...]) -> str:
    return "p" + "".join(str(i) for i in subset)


def _pn_stalk(n: int, subset: Tuple[int, ...]) -> PresentedRing:
    variables = [f"x{i}" for i in range(n + 1)] + [f"w{i}" for i in subset]
    ring = PresentedRing(variables)
    g = ring.gens
    return PresentedRing(variables, [g[f"x{i}"] * g[f"w{i}"] - 1 for i in subset])


def build_pn_model(n: int) -> RingedSpace:
    """Nonempty subsets of {0..n} with the homogeneous-coordinate localizations"""
    if n < 1:
        raise WorkbenchError(f"projective models need n >= 1, got {n}")
    poset = subsets_poset(n, label=pn_label)
    subsets = {pn_label(c): c for size in range(1, n + 2) for c in combinations(range(n + 1), size)}
    stalks = {label: _pn_stalk(n, c) for label, c in subsets.items()}
    restrictions = {}
    for lower, upper in poset.covers():
        A, B = stalks[lower], stalks[upper]
        (j,) = set(subsets[upper]) - set(subsets[lower])
        certificate = LocalizationCertificate(
            witness=A.gens[f"x{j}"],
            inverse=B.gens[f"w{j}"],
            sections={
                **{v: (A.gens[v], 0) for v in A.variables},
                f"w{j}": (A.one, 1),
            },
        )
        images = [B.gens[v] for v in A.variables]
        restrictions[(lower, upper)] = RingMap(A, B, images, certificate)
    return RingedSpace(poset, stalks, restrictions, name=f"P{n}")


def build_p1_charts() -> RingedSpace:
    """Degree-zero charts: p0 = QQ[u], p1 = QQ[v], p01 = QQ[u,w]/(uw - 1), v -> w"""
    p0 = PresentedRing(["u"])
    p1 = PresentedRing(["v"])
    scratch = PresentedRing(["u", "w"])
    p01 = PresentedRing(["u", "w"], [scratch.gens["u"] * scratch.gens["w"] - 1])
    u, w = p01.gens["u"], p01.gens["w"]
    left = RingMap(
        p0,
        p01,
        [u],
        LocalizationCertificate(
            witness=p0.gens["u"], inverse=w, sections={"u": (p0.gens["u"], 0), "w": (p0.one, 1)}
        ),
    )
    right = RingMap(
        p1,
        p01,
        [w],
        LocalizationCertificate(
            witness=p1.gens["v"], inverse=u, sections={"u": (p1.one, 1), "w": (p1.gens["v"], 0)}
        ),
    )
    poset = Poset.from_relations(["p0", "p1", "p01"], [("p0", "p01"), ("p1", "p01")])
    return RingedSpace(
        poset,
        {"p0": p0, "p1": p1, "p01": p01},
        {("p0", "p01"): left, ("p1", "p01"): right},
        name="P1",
    )


def build_affine(ring: PresentedRing, witnesses: Sequence = (), name: str = "A") -> RingedSpace:
    """Finite model of Spec(A) for the distinguished cover by D(s_1), ..., D(s_k).

    A minimum m carrying A sits below D_S = A[1/s_i : i in S] for every
    nonempty S. Without witnesses this is the one-point space.
    """
    if not witnesses:
        return build_point(ring, name=name)
    witnesses = [ring.reduce(s) for s in witnesses]
    inverse_names = []
    taken = list(ring.variables)
    for i in range(len(witnesses)):
        w = fresh_name(f"w{i + 1}", taken)
        taken.append(w)
        inverse_names.append(w)

    def label(subset: Tuple[int, ...]) -> str:
        return "D" + "".join(str(i + 1) for i in subset)

    def stalk(subset: Tuple[int, ...]) -> PresentedRing:
        variables = list(ring.variables) + [inverse_names[i] for i in subset]
        scratch = PresentedRing(variables)
        relations = [scratch.element(r) for r in ring.relations.generators]
        relations += [
            scratch.gens[inverse_names[i]] * scratch.element(witnesses[i]) - 1 for i in subset
        ]
        result = PresentedRing(variables, relations)
        if result.is_zero_ring():
            raise DegenerateLocalizationError(f"the localization {label(subset)} is the zero ring")
        return result

    k = len(witnesses)
    subsets = [c for size in range(1, k + 1) for c in combinations(range(k), size)]
    stalks: Dict[str, PresentedRing] = {"m": ring}
    stalks.update({label(c): stalk(c) for c in subsets})
    relations = [("m", label((i,))) for i in range(k)]
    relations += [
        (label(a), label(b))
        for a in subsets
        for b in subsets
        if len(b) == len(a) + 1 and set(a) <= set(b)
    ]
    poset = Poset.from_relations(list(stalks), relations)

    lookup = {label(c): c for c in subsets}
    lookup["m"] = ()
    restrictions = {}
    for lower, upper in poset.covers():
        A, B = stalks[lower], stalks[upper]
        (j,) = set(lookup[upper]) - set(lookup[lower])
        w = inverse_names[j]
        certificate = LocalizationCertificate(
            witness=A.element(witnesses[j]),
            inverse=B.gens[w],
            sections={**{v: (A.gens[v], 0) for v in A.variables}, w: (A.one, 1)},
        )
        restrictions[(lower, upper)] = RingMap(A, B, [B.gens[v] for v in A.variables], certificate)
    return RingedSpace(poset, stalks, restrictions, name=name)


@dataclass
class DvrSpace:
    """Spec of QQ[t]_(t): a closed point below the generic point.

    The stalks are described, not presented: the local ring is not finitely
    generated over QQ, so it only appears through valuations in ratfunc.
    """

    poset: Poset = field(
        default_factory=lambda: Poset.from_relations(["closed", "generic"], [("closed", "generic")])
    )
    stalks: Dict[str, str] = field(
        default_factory=lambda: {"closed": "QQ[t]_(t)", "generic": "QQ(t)"}
    )


def build_dvr_space() -> DvrSpace:
    return DvrSpace()
