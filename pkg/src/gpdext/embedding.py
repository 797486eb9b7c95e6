"""Embedding categories of a finite groupoid and the presheaf of sections."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .cohomology import AbelianPresheaf, FiniteAbelianGroup, SmallCategory
from .errors import GroupoidError
from .groupoid import FiniteGroupoid, GroupBundle
from .groups import coordinates


@dataclass(frozen=True, order=True)
class EmbeddingArrow:
    """A section of the source map over ``dom`` with injective targets inside ``cod``.

    ``values[i]`` is the arrow out of ``dom[i]``; dom and cod are sorted tuples.
    """
    dom: tuple
    cod: tuple
    values: tuple

    def at(self, x):
        return self.values[self.dom.index(x)]

    def __str__(self):
        body = ",".join(f"{x}:{v}" for x, v in zip(self.dom, self.values))
        return f"[{body}]->{{{','.join(self.cod)}}}"


class EmbeddingCategory(SmallCategory):
    def __init__(self, E: FiniteGroupoid, basis, arrows, unit_arrows):
        self.groupoid = E
        self.basis = tuple(basis)
        objs = self.basis
        dom = {a: a.dom for a in arrows}
        cod = {a: a.cod for a in arrows}
        ident = {U: EmbeddingArrow(U, U, tuple(E.units[x] for x in U)) for U in objs}
        index = {(a.dom, a.cod, a.values): a for a in arrows}
        comp = {}
        by_dom: dict = {}
        for a in arrows:
            by_dom.setdefault(a.dom, []).append(a)
        for b in arrows:  # compose a∘b where dom a = cod b
            for a in by_dom.get(b.cod, ()):
                comp[(a, b)] = index[_compose_values(E, a, b)]
        super().__init__(objs, arrows, dom, cod, comp, ident)
        self.units = frozenset(unit_arrows)

    def target(self, a: EmbeddingArrow, x):
        return self.groupoid.tgt[a.at(x)]


def _compose_values(E, a: EmbeddingArrow, b: EmbeddingArrow):
    vals = []
    for x, g in zip(b.dom, b.values):
        y = E.tgt[g]
        vals.append(E.mul(a.at(y), g))
    return (b.dom, a.cod, tuple(vals))


def default_basis(objects) -> list[tuple]:
    objs = sorted(objects)
    if len(objs) <= 4:
        return [c for r in range(1, len(objs) + 1) for c in itertools.combinations(objs, r)]
    return [(x,) for x in objs]


def _normalize_basis(E: FiniteGroupoid, basis) -> list[tuple]:
    out = []
    for U in basis:
        t = tuple(sorted(U))
        if not t or any(x not in E.objects for x in t):
            raise GroupoidError(f"basis set {U} is empty or not contained in the objects")
        if t not in out:
            out.append(t)
    for x in E.objects:
        if (x,) not in out:
            raise GroupoidError(f"basis must contain the singleton {{{x}}}")
    return sorted(out, key=lambda U: (len(U), U))


def build_embedding_category(E: FiniteGroupoid, basis=None, iso_closed: bool = False) -> EmbeddingCategory:
    """Every embedding section between basis sets; with ``iso_closed`` the basis is
    first closed under images of sections (needed for the extension construction)."""
    basis = _normalize_basis(E, default_basis(E.objects) if basis is None else basis)
    arrows = []
    bset = set(basis)
    for U in basis:
        choices = [E.out_of(x) for x in U]
        for vals in itertools.product(*choices):
            tg = [E.tgt[g] for g in vals]
            if len(set(tg)) < len(tg):
                continue
            img = set(tg)
            for V in basis:
                if img <= set(V):
                    arrows.append(EmbeddingArrow(U, V, tuple(vals)))
            if iso_closed and tuple(sorted(img)) not in bset:
                raise GroupoidError(f"basis is not closed under the image {sorted(img)}")
    units = [a for a in arrows if all(E.is_unit(g) for g in a.values)]
    return EmbeddingCategory(E, basis, arrows, units)


def unit_subcategory(cat: EmbeddingCategory) -> frozenset:
    return cat.units


def check_approximating(cat: SmallCategory, E: FiniteGroupoid, full: EmbeddingCategory | None = None) -> tuple[bool, str | None]:
    """Conditions (i)-(iii) for a subcategory of the full embedding category on the same basis.

    ``cat`` may be any SmallCategory whose arrows are EmbeddingArrows.
    """
    basis = list(cat.objects)
    arrows = set(cat.arrows)
    for U in basis:
        for V in basis:
            if set(U) <= set(V):
                unit = EmbeddingArrow(U, V, tuple(E.units[x] for x in U))
                if unit not in arrows:
                    return False, f"unit section {U}->{V} missing"
    for a in arrows:
        for W in basis:
            if set(W) <= set(a.dom) and W != a.dom:
                vals = tuple(a.at(x) for x in W)
                if not any(b.dom == W and b.values == vals and b.cod == a.cod for b in arrows):
                    return False, f"restriction of {a} to {W} missing"
    for g in E.arrows:
        x = E.src[g]
        hit = any(x in a.dom and a.at(x) == g for a in arrows)
        if not hit:
            return False, f"arrow {g} not covered"
    return True, None


def sections_presheaf(cat: EmbeddingCategory, K: GroupBundle, action) -> AbelianPresheaf:
    """Γ(U, K) with (a·σ)(x) = a(tσ(x))·σ(x); ``action[e][k]`` is k·e in K_{src e}."""
    if not K.is_abelian:
        raise GroupoidError("sections presheaf needs abelian fibers")
    E = cat.groupoid
    co = {x: coordinates(K[x]) for x in K.base}
    layout = {}
    groups = {}
    for U in cat.objects:
        offs, mods = {}, []
        for x in U:
            offs[x] = len(mods)
            mods.extend(co[x].moduli)
        layout[U] = offs
        groups[U] = FiniteAbelianGroup(tuple(mods))
    res = {}
    for a in cat.arrows:
        rows = len(groups[a.dom].moduli)
        cols = len(groups[a.cod].moduli)
        M = np.zeros((rows, cols), dtype=np.int64)
        for x, g in zip(a.dom, a.values):
            y = E.tgt[g]
            cy, cx = co[y], co[x]
            for j, gen in enumerate(cy.gens):
                img = cx.to_vec(action[g][gen])
                for i, v in enumerate(img):
                    M[layout[a.dom][x] + i, layout[a.cod][y] + j] = v
        res[a] = M
    return AbelianPresheaf(groups, res)


def section_coords(cat: EmbeddingCategory, K: GroupBundle, U: tuple, section: dict) -> tuple[int, ...]:
    """Coordinates in Γ(U,K) of a section given as {x: element index}."""
    out = []
    for x in U:
        out.extend(coordinates(K[x]).to_vec(section[x]))
    return tuple(out)


def coords_to_section(K: GroupBundle, U: tuple, vec) -> dict:
    out, i = {}, 0
    for x in U:
        c = coordinates(K[x])
        n = len(c.moduli)
        out[x] = c.from_vec(vec[i:i + n])
        i += n
    return out
