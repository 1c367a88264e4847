"""Buchberger's algorithm with Gebauer-Moeller pair pruning, plus the
membership, radical and elimination procedures built on it."""

from itertools import combinations
from typing import Iterable, List, Sequence, Set, Tuple

import structlog

from workbench.algebra.polynomials import (
    DEGREVLEX,
    Ideal,
    Polynomial,
    TermOrder,
    block,
    fresh_name,
    polynomial_ring,
    transport,
    uses_only,
    variable_names,
    with_order,
)

logger = structlog.get_logger(__name__)

Pair = Tuple[int, int]


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """Return the s-polynomial of monic polynomials f and g"""
    R = f.ring
    lmf, lmg = f.LM, g.LM
    lcm = R.monomial_lcm(lmf, lmg)
    s1 = f.mul_monom(R.monomial_div(lcm, lmf))
    s2 = g.mul_monom(R.monomial_div(lcm, lmg))
    return s1 - s2


def select(G: List[Polynomial], P: Set[Pair]) -> Pair:
    """Normal strategy: least lcm degree, ties broken by pair indices"""
    R = G[0].ring

    def key(p):
        lcm = R.monomial_lcm(G[p[0]].LM, G[p[1]].LM)
        return sum(lcm), p[0], p[1]

    return min(P, key=key)


def update(G: List[Polynomial], P: Set[Pair], f: Polynomial) -> Tuple[List[Polynomial], Set[Pair]]:
    """Return the new basis and pair set when f is added to G"""
    R = f.ring
    lmf = f.LM
    lmG = [g.LM for g in G]
    lcm = R.monomial_lcm
    mul = R.monomial_mul
    div = R.monomial_div

    P = {
        p
        for p in P
        if (
            not div(lcm(lmG[p[0]], lmG[p[1]]), lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[0]], lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[1]], lmf)
        )
    }
    lcm_dict = {}
    for i in range(len(G)):
        lcm_dict.setdefault(lcm(lmG[i], lmf), []).append(i)
    minimalized_lcms = []
    for L in sorted(lcm_dict.keys(), key=R.order):
        if all(not div(L, L_) for L_ in minimalized_lcms):
            minimalized_lcms.append(L)
    new_pairs = set()
    for L in minimalized_lcms:
        # product criterion: coprime leading monomials need no pair
        if not any(lcm(lmG[i], lmf) == mul(lmG[i], lmf) for i in lcm_dict[L]):
            new_pairs.add((min(lcm_dict[L]), len(G)))

    return G + [f], P | new_pairs


def minimalize(G: List[Polynomial]) -> List[Polynomial]:
    """Return a minimal Groebner basis from an arbitrary Groebner basis G"""
    if not G:
        return []
    R = G[0].ring
    Gmin: List[Polynomial] = []
    for f in sorted(G, key=lambda h: R.order(h.LM)):
        if all(not R.monomial_div(f.LM, g.LM) for g in Gmin):
            Gmin.append(f)
    return Gmin


def interreduce(G: List[Polynomial]) -> List[Polynomial]:
    """Return the reduced Groebner basis from a minimal Groebner basis G"""
    Gred = []
    for i in range(len(G)):
        others = G[:i] + G[i + 1 :]
        g = G[i].rem(others) if others else G[i]
        Gred.append(g.monic())
    return Gred


def normal_form(f: Polynomial, G: Sequence[Polynomial], order: TermOrder = DEGREVLEX) -> Polynomial:
    """Multivariate division remainder; divisors are tried in list order"""
    divisors = [g for g in G if g]
    if not divisors:
        return f
    ring = divisors[0].ring
    if ring.order != order.monomial_order():
        ring = with_order(ring, order)
        divisors = [transport(g, ring) for g in divisors]
    return transport(f, ring).rem(divisors)


def buchberger(I: Ideal, order: TermOrder = DEGREVLEX) -> List[Polynomial]:
    """Return the reduced Groebner basis of I under the given order"""
    R = with_order(I.ring, order)
    F = [transport(g, R) for g in I.generators]
    if not F:
        return []

    G: List[Polynomial] = []
    P: Set[Pair] = set()
    for f in F:
        G, P = update(G, P, f.monic())

    steps = 0
    while P:
        if any(g.is_ground for g in G):
            return [R.one]
        i, j = select(G, P)
        P.remove((i, j))
        r = spoly(G[i], G[j]).rem(G)
        steps += 1
        if r:
            G, P = update(G, P, r.monic())

    if any(g.is_ground for g in G):
        return [R.one]
    basis = interreduce(minimalize(G))
    logger.debug("groebner basis computed", order=str(order), size=len(basis), pairs=steps)
    return basis


def s_polynomials_vanish(G: Sequence[Polynomial]) -> bool:
    """Buchberger's criterion for the given list"""
    G = list(G)
    return all(not spoly(f, g).rem(G) for f, g in combinations(G, 2))


def ideal_membership(f: Polynomial, I: Ideal) -> bool:
    return I.contains(f)


def radical_membership(f: Polynomial, I: Ideal) -> bool:
    """f lies in the radical of I iff 1 lies in I + (1 - y*f) for a fresh y"""
    names = variable_names(I.ring)
    y = fresh_name("_y", names)
    ambient = polynomial_ring(names + (y,))
    extended = Ideal(
        ambient,
        [transport(g, ambient) for g in I.generators]
        + [ambient.one - ambient.gens[-1] * transport(f, ambient)],
    )
    return extended.is_unit()


def elimination_ideal(I: Ideal, keep: Iterable[str]) -> Ideal:
    """Generators of I intersected with QQ[keep], via a two-block order"""
    names = variable_names(I.ring)
    keep = [v for v in names if v in set(keep)]
    dropped = [v for v in names if v not in set(keep)]
    target = polynomial_ring(tuple(keep))
    if not dropped:
        return Ideal(target, I.generators)

    ambient = polynomial_ring(tuple(dropped + keep), block(len(dropped)))
    moved = Ideal(ambient, [transport(g, ambient) for g in I.generators])
    basis = moved.groebner_basis(block(len(dropped)))
    kept_positions = range(len(dropped), len(dropped) + len(keep))
    survivors = [g for g in basis if uses_only(g, kept_positions)]
    return Ideal(target, [transport(g, target) for g in survivors])
