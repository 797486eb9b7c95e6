"""Finite groupoids given by explicit composition tables.

Arrows and objects are opaque strings. ``compose[(g, h)]`` is ``g∘h`` and is
defined exactly when ``src(g) == tgt(h)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from .errors import GroupoidError, NotNormalError
from .groups import FiniteGroup


class FiniteGroupoid:
    def __init__(self, objects: Iterable, arrows: Mapping, compose: Mapping, units: Mapping):
        self.objects = tuple(str(x) for x in objects)
        self.arrows = tuple(str(a) for a in arrows)
        self.src = {str(a): str(st[0]) for a, st in arrows.items()}
        self.tgt = {str(a): str(st[1]) for a, st in arrows.items()}
        self.compose = {(str(g), str(h)): str(gh) for (g, h), gh in compose.items()}
        self.units = {str(x): str(u) for x, u in units.items()}

    def __repr__(self):
        return f"FiniteGroupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"

    def __eq__(self, other):
        return (isinstance(other, FiniteGroupoid) and set(self.objects) == set(other.objects)
                and self.src == other.src and self.tgt == other.tgt
                and self.compose == other.compose and self.units == other.units)

    def __hash__(self):
        return hash((frozenset(self.objects), len(self.arrows)))

    def mul(self, g: str, h: str) -> str:
        try:
            return self.compose[(g, h)]
        except KeyError:
            raise GroupoidError(f"{g} and {h} are not composable") from None

    def chain(self, *arrows: str) -> str:
        """Compose left to right as written: chain(a, b, c) = a∘b∘c."""
        out = arrows[-1]
        for a in reversed(arrows[:-1]):
            out = self.mul(a, out)
        return out

    @cached_property
    def inverse(self) -> dict[str, str]:
        out = {}
        for g in self.arrows:
            u = self.units[self.src[g]]
            for h in self.hom(self.tgt[g], self.src[g]):
                if self.compose.get((h, g)) == u:
                    out[g] = h
                    break
        return out

    def inv(self, g: str) -> str:
        return self.inverse[g]

    @cached_property
    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for a in self.arrows:
            out.setdefault((self.src[a], self.tgt[a]), []).append(a)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        """Arrows x -> y."""
        return self._homs.get((x, y), ())

    @cached_property
    def _ends(self) -> tuple[dict, dict]:
        outs: dict[str, list[str]] = {x: [] for x in self.objects}
        ins: dict[str, list[str]] = {x: [] for x in self.objects}
        for a in self.arrows:
            outs.setdefault(self.src[a], []).append(a)
            ins.setdefault(self.tgt[a], []).append(a)
        return ({x: tuple(v) for x, v in outs.items()}, {x: tuple(v) for x, v in ins.items()})

    def out_of(self, x: str) -> tuple[str, ...]:
        return self._ends[0].get(x, ())

    def into(self, x: str) -> tuple[str, ...]:
        return self._ends[1].get(x, ())

    def is_unit(self, g: str) -> bool:
        return self.units.get(self.src[g]) == g

    @cached_property
    def orbit_of(self) -> dict[str, int]:
        blocks = orbits(self)
        return {x: i for i, b in enumerate(blocks) for x in b}


@dataclass(frozen=True)
class GroupoidHom:
    source: FiniteGroupoid
    target: FiniteGroupoid
    obj_map: Mapping[str, str]
    arr_map: Mapping[str, str]

    def __call__(self, g: str) -> str:
        return self.arr_map[g]


@dataclass
class GroupBundle:
    """A finite group K_x at every base point."""
    fiber: dict[str, FiniteGroup] = field(default_factory=dict)

    @property
    def base(self) -> tuple[str, ...]:
        return tuple(self.fiber)

    def __getitem__(self, x: str) -> FiniteGroup:
        return self.fiber[x]

    @classmethod
    def constant(cls, base: Iterable[str], group: FiniteGroup) -> "GroupBundle":
        return cls({str(x): group for x in base})

    def restrict(self, subset: Iterable[str]) -> "GroupBundle":
        return GroupBundle({x: self.fiber[x] for x in subset})

    @property
    def is_abelian(self) -> bool:
        return all(g.is_abelian for g in self.fiber.values())


# validation

def validate_groupoid(G: FiniteGroupoid, limit: int = 50) -> list[str]:
    """Every violated groupoid axiom, as readable strings (empty when valid)."""
    report: list[str] = []
    objs = set(G.objects)
    for a in G.arrows:
        if G.src[a] not in objs or G.tgt[a] not in objs:
            report.append(f"arrow {a} has an unknown endpoint")
    if report:
        return report
    arrows = set(G.arrows)
    for (g, h), gh in G.compose.items():
        if g not in arrows or h not in arrows or gh not in arrows:
            report.append(f"composition entry ({g},{h}) mentions an unknown arrow")
        elif G.src[g] != G.tgt[h]:
            report.append(f"composition ({g},{h}) defined although src({g}) != tgt({h})")
        elif G.src[gh] != G.src[h] or G.tgt[gh] != G.tgt[g]:
            report.append(f"composite {g}∘{h} = {gh} has wrong endpoints")
    for g in G.arrows:
        for h in _into(G, G.src[g]):
            if (g, h) not in G.compose:
                report.append(f"composition ({g},{h}) missing")
    if report:
        return report[:limit]
    for x in G.objects:
        u = G.units.get(x)
        if u is None or u not in arrows or G.src[u] != x or G.tgt[u] != x:
            report.append(f"object {x} has no unit arrow")
            continue
        for g in _into(G, x):
            if G.compose[(u, g)] != g:
                report.append(f"unit law fails: {u}∘{g} != {g}")
        for g in G.out_of(x):
            if G.compose[(g, u)] != g:
                report.append(f"unit law fails: {g}∘{u} != {g}")
    for g in G.arrows:
        for h in _into(G, G.src[g]):
            gh = G.compose[(g, h)]
            for k in _into(G, G.src[h]):
                if G.compose[(gh, k)] != G.compose[(g, G.compose[(h, k)])]:
                    report.append(f"associativity fails at ({g},{h},{k})")
                    if len(report) >= limit:
                        return report
    if not report:
        for g in G.arrows:
            x, y = G.src[g], G.tgt[g]
            if not any(G.compose[(h, g)] == G.units[x] and G.compose[(g, h)] == G.units[y]
                       for h in G.hom(y, x)):
                report.append(f"arrow {g} has no inverse")
    return report[:limit]


def _into(G: FiniteGroupoid, x: str) -> tuple[str, ...]:
    return G.into(x)


def require_valid(G: FiniteGroupoid) -> None:
    rep = validate_groupoid(G, limit=1)
    if rep:
        raise GroupoidError("invalid groupoid: " + rep[0])


def validate_hom(phi: GroupoidHom) -> list[str]:
    H, G = phi.source, phi.target
    out = []
    for a in H.arrows:
        b = phi.arr_map.get(a)
        if b is None:
            out.append(f"arrow {a} unmapped")
            continue
        if G.src[b] != phi.obj_map[H.src[a]] or G.tgt[b] != phi.obj_map[H.tgt[a]]:
            out.append(f"arrow {a} does not commute with src/tgt")
    if out:
        return out
    for x in H.objects:
        if phi.arr_map[H.units[x]] != G.units[phi.obj_map[x]]:
            out.append(f"unit at {x} not preserved")
    for (g, h), gh in H.compose.items():
        if phi.arr_map[gh] != G.compose[(phi.arr_map[g], phi.arr_map[h])]:
            out.append(f"composition ({g},{h}) not preserved")
    return out


# structure

def orbits(G: FiniteGroupoid) -> list[tuple[str, ...]]:
    """Connected components of the underlying graph, each sorted, in first-object order."""
    parent = {x: x for x in G.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a in G.arrows:
        ra, rb = find(G.src[a]), find(G.tgt[a])
        if ra != rb:
            parent[rb] = ra
    blocks: dict[str, list[str]] = {}
    for x in G.objects:
        blocks.setdefault(find(x), []).append(x)
    return [tuple(sorted(b)) for b in blocks.values()]


def isotropy(G: FiniteGroupoid, x: str) -> FiniteGroup:
    """Group of self-arrows at x; element labels are the arrow identifiers."""
    if x not in G.units:
        raise GroupoidError(f"unknown object {x}")
    u = G.units[x]
    elems = [u] + sorted(a for a in G.hom(x, x) if a != u)
    idx = {a: i for i, a in enumerate(elems)}
    table = [[idx[G.compose[(a, b)]] for b in elems] for a in elems]
    return FiniteGroup(table, elems, f"Iso({x})")


def full_subgroupoid(G: FiniteGroupoid, subset: Iterable[str]) -> FiniteGroupoid:
    keep = [x for x in G.objects if x in set(subset)]
    ks = set(keep)
    arrows = {a: (G.src[a], G.tgt[a]) for a in G.arrows if G.src[a] in ks and G.tgt[a] in ks}
    comp = {k: v for k, v in G.compose.items() if k[0] in arrows and k[1] in arrows}
    return FiniteGroupoid(keep, arrows, comp, {x: G.units[x] for x in keep})


def is_complete_transversal(G: FiniteGroupoid, T: Iterable[str]) -> bool:
    T = set(T)
    return all(any(x in T for x in block) for block in orbits(G))


class Restriction(NamedTuple):
    groupoid: FiniteGroupoid
    inclusion: GroupoidHom
    complete: bool


def restrict_to_transversal(G: FiniteGroupoid, T: Iterable[str]) -> Restriction:
    T = [str(t) for t in T]
    missing = [t for t in T if t not in G.units]
    if missing:
        raise GroupoidError(f"transversal point {missing[0]} is not an object")
    GT = full_subgroupoid(G, T)
    inc = GroupoidHom(GT, G, {x: x for x in GT.objects}, {a: a for a in GT.arrows})
    return Restriction(GT, inc, is_complete_transversal(G, T))


def check_weak_equivalence(phi: GroupoidHom) -> tuple[bool, str | None]:
    """Essentially surjective and fully faithful; the witness names the first failure."""
    rep = validate_hom(phi)
    if rep:
        raise GroupoidError("not a homomorphism: " + rep[0])
    H, G = phi.source, phi.target
    images = {phi.obj_map[x] for x in H.objects}
    for y in G.objects:
        if not any(G.hom(y, z) or G.hom(z, y) for z in images):
            return False, f"object {y} is not reached from the image"
    for x in H.objects:
        for y in H.objects:
            src = H.hom(x, y)
            dst = G.hom(phi.obj_map[x], phi.obj_map[y])
            imgs = [phi.arr_map[a] for a in src]
            if len(set(imgs)) != len(imgs):
                return False, f"not faithful on {x}->{y}"
            if set(imgs) != set(dst):
                return False, f"not full on {x}->{y}"
    return True, None


def check_normal_subbundle(G: FiniteGroupoid, K: Mapping[str, Iterable[str]]) -> tuple[str, str] | None:
    """First (arrow, element) with g k g^-1 outside K, or None if K is normal."""
    sub = {x: set(v) for x, v in K.items()}
    for g in G.arrows:
        x, y = G.src[g], G.tgt[g]
        gi = G.inv(g)
        for k in sub.get(x, ()):
            if G.chain(g, k, gi) not in sub.get(y, ()):
                return g, k
    return None


def quotient_by_bundle(G: FiniteGroupoid, K: Mapping[str, Iterable[str]]) -> tuple[FiniteGroupoid, GroupoidHom]:
    """Quotient E = G/K. An E-arrow is named by the least G-arrow in its coset."""
    require_valid(G)
    sub = {x: sorted(set(K.get(x, ())) | {G.units[x]}) for x in G.objects}
    for x, ks in sub.items():
        for k in ks:
            if k not in G.src or G.src[k] != x or G.tgt[k] != x:
                raise GroupoidError(f"{k} is not in the isotropy at {x}")
        for a, b in itertools.product(ks, ks):
            if G.compose[(a, b)] not in ks:
                raise GroupoidError(f"K at {x} is not closed under composition")
    bad = check_normal_subbundle(G, sub)
    if bad:
        raise NotNormalError(f"conjugate of {bad[1]} by {bad[0]} leaves K", bad)
    cls: dict[str, str] = {}
    for g in G.arrows:
        if g in cls:
            continue
        coset = [G.compose[(g, k)] for k in sub[G.src[g]]]
        name = min(coset)
        for h in coset:
            cls[h] = name
    reps = sorted(set(cls.values()), key=G.arrows.index)
    arrows = {r: (G.src[r], G.tgt[r]) for r in reps}
    comp = {}
    for a in reps:
        for b in reps:
            if G.src[a] == G.tgt[b]:
                comp[(a, b)] = cls[G.compose[(a, b)]]
    E = FiniteGroupoid(G.objects, arrows, comp, {x: cls[G.units[x]] for x in G.objects})
    pi = GroupoidHom(G, E, {x: x for x in G.objects}, cls)
    return E, pi


def kernel_subbundle(pi: GroupoidHom) -> dict[str, tuple[str, ...]]:
    E = pi.target
    out: dict[str, list[str]] = {x: [] for x in pi.source.objects}
    for g, e in pi.arr_map.items():
        if E.is_unit(e):
            out[pi.source.src[g]].append(g)
    return {x: tuple(v) for x, v in out.items()}


# constructors

def group_groupoid(G: FiniteGroup, obj: str = "*") -> FiniteGroupoid:
    """The one-object groupoid B(G); arrows are the element labels."""
    L = G.labels
    arrows = {L[a]: (obj, obj) for a in G}
    comp = {(L[a], L[b]): L[G.mul(a, b)] for a in G for b in G}
    return FiniteGroupoid([obj], arrows, comp, {obj: L[G.identity]})


def pair_groupoid(objects: Iterable) -> FiniteGroupoid:
    objs = [str(x) for x in objects]
    arrows = {f"{x}->{y}": (x, y) for x in objs for y in objs}
    comp = {(f"{y}->{z}", f"{x}->{y}"): f"{x}->{z}" for x in objs for y in objs for z in objs}
    return FiniteGroupoid(objs, arrows, comp, {x: f"{x}->{x}" for x in objs})


def transitive_groupoid(objects: Iterable, G: FiniteGroup) -> FiniteGroupoid:
    """Pair groupoid times B(G): arrows x->y carry a group element, named "x->y:g"."""
    objs = [str(x) for x in objects]
    L = G.labels

    def name(x, y, a):
        return f"{x}->{y}:{L[a]}"
    arrows = {name(x, y, a): (x, y) for x in objs for y in objs for a in G}
    comp = {(name(y, z, a), name(x, y, b)): name(x, z, G.mul(a, b))
            for x in objs for y in objs for z in objs for a in G for b in G}
    return FiniteGroupoid(objs, arrows, comp, {x: name(x, x, G.identity) for x in objs})


def discrete_groupoid(objects: Iterable) -> FiniteGroupoid:
    objs = [str(x) for x in objects]
    return FiniteGroupoid(objs, {f"1_{x}": (x, x) for x in objs},
                          {(f"1_{x}", f"1_{x}"): f"1_{x}" for x in objs}, {x: f"1_{x}" for x in objs})


def disjoint_union(*parts: FiniteGroupoid) -> FiniteGroupoid:
    objs, arrows, comp, units = [], {}, {}, {}
    for P in parts:
        if set(objs) & set(P.objects) or set(arrows) & set(P.arrows):
            raise GroupoidError("disjoint union of overlapping groupoids")
        objs += P.objects
        arrows.update({a: (P.src[a], P.tgt[a]) for a in P.arrows})
        comp.update(P.compose)
        units.update(P.units)
    return FiniteGroupoid(objs, arrows, comp, units)


def action_groupoid(G: FiniteGroup, points: Iterable, act) -> FiniteGroupoid:
    """Left action groupoid: arrow (g, x) : x -> g.x, named "g@x"."""
    pts = [str(p) for p in points]
    L = G.labels
    arrows = {f"{L[g]}@{x}": (x, str(act(g, x))) for g in G for x in pts}
    comp = {}
    for g in G:
        for h in G:
            for x in pts:
                y = str(act(h, x))
                comp[(f"{L[g]}@{y}", f"{L[h]}@{x}")] = f"{L[G.mul(g, h)]}@{x}"
    return FiniteGroupoid(pts, arrows, comp, {x: f"{L[G.identity]}@{x}" for x in pts})


def relabel(G: FiniteGroupoid, names: Mapping[str, str]) -> FiniteGroupoid:
    """Rename arrows (objects keep their names)."""
    r = lambda a: names.get(a, a)
    return FiniteGroupoid(G.objects, {r(a): (G.src[a], G.tgt[a]) for a in G.arrows},
                          {(r(g), r(h)): r(gh) for (g, h), gh in G.compose.items()},
                          {x: r(u) for x, u in G.units.items()})


def pullback_groupoid(G: FiniteGroupoid, along: Mapping[str, str]) -> tuple[FiniteGroupoid, GroupoidHom]:
    """Pull G back along a map of object sets ``along: new object -> object of G``.

    Arrows x -> y are the arrows f(x) -> f(y) of G, named "x|g|y". When ``along`` is
    surjective the projection is a weak equivalence.
    """
    new = [str(x) for x in along]
    f = {str(x): str(v) for x, v in along.items()}
    bad = [v for v in f.values() if v not in G.objects]
    if bad:
        raise GroupoidError(f"pullback target {bad[0]} is not an object")

    def name(x, g, y):
        return f"{x}|{g}|{y}"
    arrows, arr_map = {}, {}
    for x in new:
        for y in new:
            for g in G.hom(f[x], f[y]):
                arrows[name(x, g, y)] = (x, y)
                arr_map[name(x, g, y)] = g
    comp = {}
    for x in new:
        for y in new:
            for z in new:
                for g in G.hom(f[y], f[z]):
                    for h in G.hom(f[x], f[y]):
                        comp[(name(y, g, z), name(x, h, y))] = name(x, G.mul(g, h), z)
    P = FiniteGroupoid(new, arrows, comp, {x: name(x, G.units[f[x]], x) for x in new})
    return P, GroupoidHom(P, G, f, arr_map)
