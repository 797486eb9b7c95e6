"""Named extensions and groupoids used by the tests, the acceptance suite and the CLI."""
from __future__ import annotations

import random
from typing import Callable, Sequence

from .errors import GroupoidError
from .extension import ActionData, Extension, semidirect_unit, trivial_action
from .groupoid import FiniteGroupoid, GroupBundle, disjoint_union, transitive_groupoid
from .groups import FiniteGroup, cyclic, dihedral, direct_product, symmetric


def group_extension(G: FiniteGroup, Q: FiniteGroup, quotient: Sequence[int], K: FiniteGroup,
                    embed: Sequence[int], objects=("*",)) -> Extension:
    """K -> G -> Q as an extension of transitive groupoids on ``objects``.

    ``quotient[g]`` is the image of g in Q and ``embed[k]`` the image of k in G.
    """
    objs = [str(x) for x in objects]
    GG = transitive_groupoid(objs, G)
    EE = transitive_groupoid(objs, Q)
    pi = {}
    for x in objs:
        for y in objs:
            for g in G:
                pi[f"{x}->{y}:{G.label(g)}"] = f"{x}->{y}:{Q.label(quotient[g])}"
    j = {x: tuple(f"{x}->{x}:{G.label(embed[k])}" for k in K) for x in objs}
    return Extension(GroupBundle.constant(objs, K), GG, EE, j, pi)


def union_of_extensions(*parts: Extension) -> Extension:
    """Extension over the disjoint union of the bases (objects and arrows must be disjoint)."""
    G = disjoint_union(*(p.G for p in parts))
    E = disjoint_union(*(p.E for p in parts))
    K, j, pi = {}, {}, {}
    for p in parts:
        K.update(p.K.fiber)
        j.update(p.j)
        pi.update(p.pi)
    return Extension(GroupBundle(K), G, E, j, pi)


def _order_element(G: FiniteGroup, order: int) -> int:
    return next(g for g in G if G.element_order(g) == order)


def e_cyclic(n: int, objects=("*",)) -> FiniteGroupoid:
    return transitive_groupoid([str(x) for x in objects], cyclic(n))


def split(n: int, m: int, objects=("*",)) -> Extension:
    """Z/m x Z/n with the trivial action."""
    E = e_cyclic(n, objects)
    K = GroupBundle.constant([str(x) for x in objects], cyclic(m))
    return semidirect_unit(K, E, trivial_action(E, K))


def cyclic_extension(n: int, m: int, twist: int = 1, objects=("*",)) -> Extension:
    """Z/m -> Z/(nm) -> Z/n with π(g) = twist·g mod n (twist a unit mod n)."""
    G, Q, K = cyclic(n * m), cyclic(n), cyclic(m)
    return group_extension(G, Q, [(twist * g) % n for g in G], K, [n * k for k in K], objects)


def s3_over_z2() -> Extension:
    """Z/3 -> S3 -> Z/2 (sign), acting by inversion."""
    S = symmetric(3)
    r = _order_element(S, 3)
    A3 = {S.identity, r, S.mul(r, r)}
    sign = [0 if g in A3 else 1 for g in S]
    return group_extension(S, cyclic(2), sign, cyclic(3), [S.power(r, k) for k in range(3)])


def d8_over_klein() -> Extension:
    """Z/2 -> D8 -> Z/2×Z/2 with K the centre."""
    D = dihedral(8)
    V = direct_product(cyclic(2), cyclic(2))
    centre = [g for g in D.center if g != D.identity][0]
    # D8 / <r^2>: r ↦ (1,0), s ↦ (0,1)
    quotient = []
    for g in D:
        lab = D.label(g)
        s = 1 if lab.startswith("s") else 0
        i = int(lab.lstrip("sr"))
        quotient.append(V.index(f"({i % 2},{s})"))
    return group_extension(D, V, quotient, cyclic(2), [D.identity, centre])


def split_with_inversion(objects=("*",)) -> Extension:
    """Z/3 ⋊ Z/2 built as the semidirect unit."""
    objs = [str(x) for x in objects]
    E = e_cyclic(2, objs)
    K = GroupBundle.constant(objs, cyclic(3))
    table = {}
    for e in E.arrows:
        flip = e.endswith(":1")
        table[e] = (0, 2, 1) if flip else (0, 1, 2)
    return semidirect_unit(K, E, ActionData(E, K, table))


def two_orbit() -> Extension:
    """Z/4 over B(Z/2) at one point and the split Z/2×Z/2 at another."""
    return union_of_extensions(cyclic_extension(2, 2, objects=("a",)), split(2, 2, objects=("b",)))


def s3_times_z2() -> Extension:
    """S3 -> S3×Z/2 -> Z/2, the non-abelian fixture."""
    S = symmetric(3)
    G = direct_product(S, cyclic(2))
    quotient = [g % 2 for g in G]      # direct_product orders pairs lexicographically
    embed = [2 * s for s in S]
    return group_extension(G, cyclic(2), quotient, S, embed)


ABELIAN_FIXTURES: dict[str, Callable[[], Extension]] = {
    "split-z2": lambda: split(2, 2),
    "z4-over-z2": lambda: cyclic_extension(2, 2),
    "split-z3": lambda: split(3, 3),
    "z9-over-z3": lambda: cyclic_extension(3, 3, 1),
    "z9-over-z3-twisted": lambda: cyclic_extension(3, 3, 2),
    "s3-over-z2": s3_over_z2,
    "split-inversion": split_with_inversion,
    "z4-pair": lambda: cyclic_extension(2, 2, objects=("a", "b")),
    "split-pair": lambda: split(2, 2, objects=("a", "b")),
    "two-orbit": two_orbit,
    "d8-over-klein": d8_over_klein,
}

NONABELIAN_FIXTURES: dict[str, Callable[[], Extension]] = {
    "s3-times-z2": s3_times_z2,
}


def fixture(name: str) -> Extension:
    table = {**ABELIAN_FIXTURES, **NONABELIAN_FIXTURES}
    if name not in table:
        raise GroupoidError(f"unknown fixture {name}; known: {', '.join(sorted(table))}")
    return table[name]()


# random instances

def _aut_group(K: FiniteGroup) -> tuple[FiniteGroup, list]:
    autos = list(K.automorphisms)
    idx = {a: i for i, a in enumerate(autos)}
    # composition (a∘b)(k) = a(b(k))
    table = [[idx[tuple(a[b[k]] for k in K)] for b in autos] for a in autos]
    return FiniteGroup(table), autos


RANDOM_K = [lambda: cyclic(2), lambda: cyclic(3), lambda: cyclic(4), lambda: cyclic(5), lambda: cyclic(6),
            lambda: direct_product(cyclic(2), cyclic(2))]
RANDOM_E_PIECES = [(1, lambda: cyclic(1)), (1, lambda: cyclic(2)), (1, lambda: cyclic(3)), (1, lambda: cyclic(4)),
                   (1, lambda: direct_product(cyclic(2), cyclic(2))), (1, lambda: symmetric(3)),
                   (2, lambda: cyclic(1)), (2, lambda: cyclic(2)), (2, lambda: cyclic(3)), (3, lambda: cyclic(1))]


def random_base(rng: random.Random, max_objects: int = 3, max_arrows: int = 12):
    """A disjoint union of transitive groupoids; returns (E, pieces) with pieces (objects, group)."""
    while True:
        pieces, used, arrows = [], 0, 0
        while used < max_objects:
            n, mk = rng.choice(RANDOM_E_PIECES)
            Q = mk()
            if used + n > max_objects or arrows + n * n * Q.order > max_arrows:
                break
            objs = [f"x{used + i}" for i in range(n)]
            pieces.append((objs, Q))
            used += n
            arrows += n * n * Q.order
            if rng.random() < 0.5:
                break
        if pieces:
            E = disjoint_union(*(transitive_groupoid(o, Q) for o, Q in pieces))
            return E, pieces


def random_action(rng: random.Random, E: FiniteGroupoid, pieces, K_of: dict) -> ActionData:
    """Per piece, a random homomorphism ρ: Q -> Aut(K); the arrow x->y:q acts by ρ(q)⁻¹."""
    table = {}
    for objs, Q in pieces:
        K = K_of[objs[0]]
        A, autos = _aut_group(K)
        homs = Q.homomorphisms(A)
        rho = rng.choice(homs)
        for x in objs:
            for y in objs:
                for q in Q:
                    a = autos[A.inv(rho[q])]
                    table[f"{x}->{y}:{Q.label(q)}"] = tuple(a)
    return ActionData(E, GroupBundle(K_of), table)


def random_abelian_data(seed: int, max_k: int = 6):
    """(E, K, μ) with at most 3 objects, |E| ≤ 12 arrows and abelian |K| ≤ max_k."""
    rng = random.Random(seed)
    E, pieces = random_base(rng)
    K_of = {}
    for objs, _ in pieces:
        K = rng.choice([mk for mk in RANDOM_K if mk().order <= max_k])()
        for x in objs:
            K_of[x] = K
    mu = random_action(rng, E, pieces, K_of)
    return E, GroupBundle(K_of), mu


# obstruction instances

OBSTRUCTION_GROUPS = [lambda: cyclic(1), lambda: cyclic(2), lambda: cyclic(3)]
SMALL_K = [lambda: cyclic(2), lambda: cyclic(3), lambda: cyclic(4), lambda: direct_product(cyclic(2), cyclic(2))]


def tetrahedron_cover(points) -> list[tuple]:
    """The four complements of single points of a 4-point set."""
    pts = sorted(points)
    return [tuple(p for p in pts if p != q) for q in pts]


def random_cover(rng: random.Random, points) -> list[tuple]:
    pts = sorted(points)
    while True:
        n = rng.randint(1, 4)
        cover = [tuple(sorted(p for p in pts if rng.random() < 0.6)) for _ in range(n)]
        cover = [U for U in cover if U]
        if cover and set().union(*map(set, cover)) == set(pts):
            return cover


def random_obstruction_instance(seed: int, tetrahedron: bool = False):
    """(E, T, B, cover, choices): E on at most 4 points, B a random extension of E_T by |K| ≤ 4.

    With ``tetrahedron`` the base has exactly 4 points and the cover is the tetrahedron cover.
    """
    from .groupoid import full_subgroupoid
    from .oracles import random_schreier_extension
    rng = random.Random(seed)
    while True:
        sizes, left = [], 4 if tetrahedron else rng.randint(1, 4)
        while left:
            n = rng.randint(1, left)
            sizes.append(n)
            left -= n
        if not tetrahedron or sum(sizes) == 4:
            break
    pieces, used = [], 0
    for n in sizes:
        pieces.append(([f"m{used + i}" for i in range(n)], rng.choice(OBSTRUCTION_GROUPS)()))
        used += n
    E = disjoint_union(*(transitive_groupoid(o, Q) for o, Q in pieces))
    while True:
        # keep E_T at most 12 arrows so the random cocycle stays cheap
        T, t_pieces = [], []
        for objs, Q in pieces:
            chosen = sorted(rng.sample(objs, rng.randint(1, len(objs))))
            T += chosen
            t_pieces.append((chosen, Q))
        if sum(len(c) ** 2 * Q.order for c, Q in t_pieces) <= 12:
            break
    K_of = {}
    for chosen, _ in t_pieces:
        K = rng.choice(SMALL_K)()
        for x in chosen:
            K_of[x] = K
    ET = full_subgroupoid(E, T)
    mu = random_action(rng, ET, t_pieces, K_of)
    B = random_schreier_extension(ET, GroupBundle(K_of), mu.table, seed)
    cover = tetrahedron_cover(E.objects) if tetrahedron else random_cover(rng, E.objects)
    choices = {}
    for i, U in enumerate(cover):
        for x in U:
            if x not in T:
                choices[(i, x)] = rng.choice(sorted(a for a in E.out_of(x) if E.tgt[a] in T))
    return E, tuple(sorted(T)), B, cover, choices
