"""Abelian 2-cocycles on embedding categories and the extensions they classify.

A cocycle value ``values[(s, t)]`` is a section over ``t.dom`` stored as a tuple
of element indices aligned with ``t.dom``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cohomology import CategoryComplex, CohomologyGroup, complex_cohomology
from .embedding import (EmbeddingArrow, EmbeddingCategory, build_embedding_category, coords_to_section,
                        section_coords, sections_presheaf)
from .errors import GroupoidError, NotNormalError
from .extension import (ActionData, Extension, ExtensionMorphism, induced_action, validate_extension)
from .groupoid import FiniteGroupoid, GroupBundle, GroupoidHom


@dataclass
class RelativeCocycle:
    cat: EmbeddingCategory
    K: GroupBundle
    action: ActionData
    values: dict
    normal: bool = False

    def at(self, s, t, x) -> int:
        return self.values[(s, t)][t.dom.index(x)]


@dataclass
class CocycleContext:
    """Everything needed to move between cocycles and vectors for one (cat, K, action)."""
    cat: EmbeddingCategory
    K: GroupBundle
    action: ActionData
    complex: CategoryComplex = field(init=False)

    def __post_init__(self):
        A = sections_presheaf(self.cat, self.K, self.action.table)
        self.presheaf = A
        self.complex = CategoryComplex(self.cat, A, relative_to=self.cat.units)
        self._H = None

    @property
    def H2(self) -> CohomologyGroup:
        if self._H is None:
            self._H = complex_cohomology(self.complex, 2)
        return self._H

    def vector(self, xi: RelativeCocycle) -> np.ndarray:
        cochain = {}
        for (s, t), vals in xi.values.items():
            cochain[(s.cod, s, t)] = section_coords(self.cat, self.K, t.dom, dict(zip(t.dom, vals)))
        return self.complex.to_vector(2, cochain)

    def cocycle(self, v, normal: bool = False) -> RelativeCocycle:
        cochain = self.complex.to_cochain(2, v)
        values = {}
        for s in self.cat.arrows:
            for t in self.cat.into[s.dom]:
                c = cochain.get((s.cod, s, t))
                if c is None:
                    values[(s, t)] = tuple(self.K[x].identity for x in t.dom)
                else:
                    sec = coords_to_section(self.K, t.dom, c)
                    values[(s, t)] = tuple(sec[x] for x in t.dom)
        return RelativeCocycle(self.cat, self.K, self.action, values, normal)

    def one_cochain(self, v) -> dict:
        """Relative 1-cochain vector -> {arrow: section tuple}."""
        c = self.complex.to_cochain(1, v)
        out = {}
        for a in self.cat.arrows:
            val = c.get((a.cod, a))
            if val is None:
                out[a] = tuple(self.K[x].identity for x in a.dom)
            else:
                sec = coords_to_section(self.K, a.dom, val)
                out[a] = tuple(sec[x] for x in a.dom)
        return out

    def class_of(self, xi: RelativeCocycle) -> tuple[int, ...]:
        return self.H2.class_of(self.vector(xi))


def context_for(ext_or_E, K: GroupBundle | None = None, action: ActionData | None = None, basis=None,
                cat: EmbeddingCategory | None = None) -> CocycleContext:
    if isinstance(ext_or_E, Extension):
        ext = ext_or_E
        E, K, action = ext.E, ext.K, induced_action(ext)
    else:
        E = ext_or_E
    if cat is None:
        cat = build_embedding_category(E, basis, iso_closed=True)
    return CocycleContext(cat, K, action)


# cocycle identities

def cocycle_violations(xi: RelativeCocycle, limit: int = 10) -> list[str]:
    cat, K, mu = xi.cat, xi.K, xi.action
    E = cat.groupoid
    out = []
    for (s, t), vals in xi.values.items():
        if s in cat.units and t in cat.units and any(v != K[x].identity for x, v in zip(t.dom, vals)):
            out.append(f"nonzero on the unit pair ({s},{t})")
    for r in cat.arrows:
        for s in cat.into[r.dom]:
            rs = cat.compose[(r, s)]
            for t in cat.into[s.dom]:
                st = cat.compose[(s, t)]
                for x, et in zip(t.dom, t.values):
                    y = E.tgt[et]
                    Kx = K[x]
                    lhs = Kx.mul(xi.at(r, st, x), xi.at(s, t, x))
                    rhs = Kx.mul(xi.at(rs, t, x), mu.table[et][xi.at(r, s, y)])
                    if lhs != rhs:
                        out.append(f"cocycle identity fails at ({r},{s},{t}) over {x}")
                        if len(out) >= limit:
                            return out
    return out


def is_normal(xi: RelativeCocycle) -> bool:
    K = xi.K
    for (s, t), vals in xi.values.items():
        if s in xi.cat.units and any(v != K[x].identity for x, v in zip(t.dom, vals)):
            return False
    return True


# liftings

def default_liftings(ext: Extension, cat: EmbeddingCategory) -> dict:
    """Pointwise least-named lifts, units lifted to units."""
    per_arrow = {}
    for e in ext.E.arrows:
        per_arrow[e] = ext.G.units[ext.E.src[e]] if ext.E.is_unit(e) else ext.lift(e)
    return {s: tuple(per_arrow[e] for e in s.values) for s in cat.arrows}


def extension_to_cocycle(ext: Extension, cat: EmbeddingCategory, liftings: dict | None = None) -> RelativeCocycle:
    """c(s1, s2)(x) = (s1 s2)~(x)⁻¹ s1~(y) s2~(x)."""
    if liftings is None:
        liftings = default_liftings(ext, cat)
    G, E = ext.G, ext.E
    for s, lifts in liftings.items():
        for e, g in zip(s.values, lifts):
            if ext.pi[g] != e:
                raise GroupoidError(f"lifting of {s} does not cover {e}")
        if s in cat.units and any(not G.is_unit(g) for g in lifts):
            raise GroupoidError(f"unit section {s} must be lifted to units")
    values = {}
    for s1 in cat.arrows:
        l1 = dict(zip(s1.dom, liftings[s1]))
        for s2 in cat.into[s1.dom]:
            s12 = cat.compose[(s1, s2)]
            l12 = liftings[s12]
            row = []
            for x, e2, g2, g12 in zip(s2.dom, s2.values, liftings[s2], l12):
                y = E.tgt[e2]
                row.append(ext.kernel_index[G.chain(G.inv(g12), l1[y], g2)])
            values[(s1, s2)] = tuple(row)
    xi = RelativeCocycle(cat, ext.K, induced_action(ext), values)
    xi.normal = is_normal(xi)
    return xi


def lifting_change(ext: Extension, cat, tilde: dict, bar: dict) -> dict:
    """f(s)(x) = bar(x)⁻¹ tilde(x) as sections, per arrow."""
    G = ext.G
    return {s: tuple(ext.kernel_index[G.mul(G.inv(b), t)] for b, t in zip(bar[s], tilde[s])) for s in cat.arrows}


def coboundary_of(cat: EmbeddingCategory, K: GroupBundle, mu: ActionData, f: dict) -> dict:
    """(df)(s, t) = f(t) - f(st) + f(s)·t as a 2-cochain of sections."""
    E = cat.groupoid
    out = {}
    for s in cat.arrows:
        fs = dict(zip(s.dom, f[s]))
        for t in cat.into[s.dom]:
            st = cat.compose[(s, t)]
            row = []
            for x, e, a, b in zip(t.dom, t.values, f[t], f[st]):
                Kx = K[x]
                y = E.tgt[e]
                row.append(Kx.mul(Kx.mul(a, Kx.inv(b)), mu.table[e][fs[y]]))
            out[(s, t)] = tuple(row)
    return out


def add_cochains(K: GroupBundle, a: dict, b: dict, cat: EmbeddingCategory, sign: int = 1) -> dict:
    out = {}
    for key, va in a.items():
        t = key[1]
        vb = b[key]
        out[key] = tuple(K[x].mul(p, q if sign > 0 else K[x].inv(q)) for x, p, q in zip(t.dom, va, vb))
    return out


# normalization

def factor_through_image(cat: EmbeddingCategory, s: EmbeddingArrow) -> tuple[EmbeddingArrow, EmbeddingArrow]:
    """s = i ∘ s0 with s0 onto its image and i a unit section; needs the image in the basis."""
    E = cat.groupoid
    image = tuple(sorted(E.tgt[e] for e in s.values))
    if image not in cat.basis:
        raise GroupoidError(f"image {image} of {s} is not a basis set")
    s0 = EmbeddingArrow(s.dom, image, s.values)
    i = EmbeddingArrow(image, s.cod, tuple(E.units[x] for x in image))
    return i, s0


def normalize_cocycle(xi: RelativeCocycle) -> tuple[RelativeCocycle, dict]:
    """ξ + dg with g(s) = ξ(i, s0); returns the normal cocycle and g."""
    cat, K = xi.cat, xi.K
    g = {}
    for s in cat.arrows:
        i, s0 = factor_through_image(cat, s)
        g[s] = xi.values[(i, s0)]
    dg = coboundary_of(cat, K, xi.action, g)
    values = add_cochains(K, xi.values, dg, cat)
    out = RelativeCocycle(cat, K, xi.action, values)
    out.normal = is_normal(out)
    return out, g


def normalization_identities(zeta: RelativeCocycle) -> list[str]:
    """ζ(jσ,τ) = ζ(σ,τ) for unit j, ζ(σ,1) = 1, and ζ(σ,σ⁻¹)·σ = ζ(σ⁻¹,σ) for isomorphisms σ."""
    cat, K, mu = zeta.cat, zeta.K, zeta.action
    E = cat.groupoid
    out = []
    for j in cat.units:
        for s in cat.into[j.dom]:
            js = cat.compose[(j, s)]
            for t in cat.into[s.dom]:
                if zeta.values[(js, t)] != zeta.values[(s, t)]:
                    out.append(f"ζ(jσ,τ) ≠ ζ(σ,τ) at j={j}, σ={s}, τ={t}")
    for s in cat.arrows:
        one = cat.identity[s.dom]
        if any(v != K[x].identity for x, v in zip(one.dom, zeta.values[(s, one)])):
            out.append(f"ζ(σ,1) ≠ 1 at {s}")
    for s in cat.arrows:
        image = tuple(sorted(E.tgt[e] for e in s.values))
        if image != s.cod:
            continue
        inv_vals = []
        for y in s.cod:
            x = next(x for x, e in zip(s.dom, s.values) if E.tgt[e] == y)
            inv_vals.append(E.inv(s.at(x)))
        sinv = EmbeddingArrow(s.cod, s.dom, tuple(inv_vals))
        # ζ(σ,σ⁻¹) lives over cod σ; act by σ to land over dom σ
        a = dict(zip(sinv.dom, zeta.values[(s, sinv)]))
        b = dict(zip(s.dom, zeta.values[(sinv, s)]))
        for x, e in zip(s.dom, s.values):
            if mu.table[e][a[E.tgt[e]]] != b[x]:
                out.append(f"ζ(σ,σ⁻¹)·σ ≠ ζ(σ⁻¹,σ) at {s}")
                break
    return out


# G(ξ)

@dataclass
class CocycleExtension:
    extension: Extension
    xi: RelativeCocycle
    name: dict            # (e, k) -> arrow name
    pair: dict            # arrow name -> (e, k)

    def canonical(self, s: EmbeddingArrow, k: int, x) -> str:
        """Class of (σ, k) at x in singleton form: (σ(x), ξ(σ, i_x)(x)·k)."""
        cat = self.xi.cat
        E = cat.groupoid
        e = s.at(x)
        point = (x,)
        ix = EmbeddingArrow(point, s.dom, (E.units[x],))
        c = self.xi.values[(s, ix)][0] if s.dom != point else self.xi.K[x].identity
        return self.name[(e, self.xi.K[x].mul(c, k))]


def singleton_arrow(E: FiniteGroupoid, e: str) -> EmbeddingArrow:
    return EmbeddingArrow((E.src[e],), (E.tgt[e],), (e,))


def cocycle_to_extension(xi: RelativeCocycle) -> CocycleExtension:
    """Arrows [e, k] (e: x -> y, k in K_x) with [f,l][e,k] = [fe, ξ(f,e)(x)·(l·e)·k]."""
    if not is_normal(xi):
        raise NotNormalError("cocycle must be normal", None)
    cat, K, mu = xi.cat, xi.K, xi.action
    E = cat.groupoid
    name, pair, arrows = {}, {}, {}
    for e in E.arrows:
        x = E.src[e]
        for k in range(K[x].order):
            nm = f"[{e},{K[x].label(k)}]"
            name[(e, k)] = nm
            pair[nm] = (e, k)
            arrows[nm] = (x, E.tgt[e])
    compose = {}
    for (f, e), fe in E.compose.items():
        x, y = E.src[e], E.tgt[e]
        c = xi.values[(singleton_arrow(E, f), singleton_arrow(E, e))][0]
        Kx = K[x]
        for l in range(K[y].order):
            le = mu.table[e][l]
            for k in range(Kx.order):
                compose[(name[(f, l)], name[(e, k)])] = name[(fe, Kx.mul(Kx.mul(c, le), k))]
    units = {x: name[(E.units[x], K[x].identity)] for x in E.objects}
    G = FiniteGroupoid(E.objects, arrows, compose, units)
    j = {x: tuple(name[(E.units[x], k)] for k in range(K[x].order)) for x in E.objects}
    pi = {nm: p[0] for nm, p in pair.items()}
    return CocycleExtension(Extension(K, G, E, j, pi), xi, name, pair)


def canonical_liftings(ce: CocycleExtension) -> dict:
    """σ~(x) = [σ0, 1_x] where σ = i∘σ0."""
    cat = ce.xi.cat
    out = {}
    for s in cat.arrows:
        _, s0 = factor_through_image(cat, s)
        out[s] = tuple(ce.canonical(s0, ce.xi.K[x].identity, x) for x in s.dom)
    return out


def comparison_map(ext: Extension, xi: RelativeCocycle, ce: CocycleExtension,
                   liftings: dict | None = None) -> ExtensionMorphism:
    """φ(g) = [π(g), e~(x)⁻¹ g] from ext to G(ξ), using the lift of the singleton arrow e = π(g)."""
    if liftings is None:
        liftings = default_liftings(ext, xi.cat)
    E, G = ext.E, ext.G
    f = {}
    for g in G.arrows:
        e = ext.pi[g]
        lift = liftings[singleton_arrow(E, e)][0]
        k = ext.kernel_index[G.mul(G.inv(lift), g)]
        f[g] = ce.name[(e, k)]
    return ExtensionMorphism(ext, ce.extension, f, {x: tuple(range(ext.K[x].order)) for x in ext.K.base})


def isomorphism_between_cohomologous(ce_xi: CocycleExtension, ce_zeta: CocycleExtension, g: dict) -> ExtensionMorphism:
    """[σ,k] ↦ [σ, g(σ)⁻¹k] when ζ = ξ + dg (singleton form)."""
    E = ce_xi.xi.cat.groupoid
    K = ce_xi.xi.K
    f = {}
    for nm, (e, k) in ce_xi.pair.items():
        x = E.src[e]
        ge = g[singleton_arrow(E, e)][0]
        f[nm] = ce_zeta.name[(e, K[x].mul(K[x].inv(ge), k))]
    return ExtensionMorphism(ce_xi.extension, ce_zeta.extension, f, {x: tuple(range(K[x].order)) for x in K.base})


def cocycles_cohomologous(ctx: CocycleContext, xi: RelativeCocycle, zeta: RelativeCocycle) -> dict | None:
    """Some relative 1-cochain g with ζ = ξ + dg, or None."""
    diff = (ctx.vector(zeta) - ctx.vector(xi))
    mods = np.array(ctx.complex.group(2), dtype=np.int64)
    diff = diff % mods if len(mods) else diff
    w = ctx.H2.coboundary_witness(diff)
    if w is None:
        return None
    return ctx.one_cochain(w)


# round trips

@dataclass
class RoundTripReport:
    ok: bool
    failures: list = field(default_factory=list)


def roundtrip_extension(ext: Extension, cat: EmbeddingCategory | None = None) -> RoundTripReport:
    from .extension import validate_morphism
    if cat is None:
        cat = build_embedding_category(ext.E, iso_closed=True)
    xi = extension_to_cocycle(ext, cat)
    rep = RoundTripReport(True)
    bad = cocycle_violations(xi)
    if bad:
        rep.failures += bad
    if not xi.normal:
        rep.failures.append("default liftings gave a non-normal cocycle")
    ce = cocycle_to_extension(xi)
    rep.failures += [f"G(ξ): {m}" for m in validate_extension(ce.extension)]
    phi = comparison_map(ext, xi, ce)
    rep.failures += [f"comparison: {m}" for m in validate_morphism(phi)]
    rep.ok = not rep.failures
    return rep


def roundtrip_cocycle(xi: RelativeCocycle) -> RoundTripReport:
    rep = RoundTripReport(True)
    ce = cocycle_to_extension(xi)
    rep.failures += [f"G(ξ): {m}" for m in validate_extension(ce.extension)]
    if not rep.failures:
        zeta = extension_to_cocycle(ce.extension, xi.cat, canonical_liftings(ce))
        for key, v in xi.values.items():
            if zeta.values[key] != v:
                rep.failures.append(f"ζ ≠ ξ at {key[0]}, {key[1]}")
                break
    rep.ok = not rep.failures
    return rep


# class enumeration

def pi0_extension_classes(E: FiniteGroupoid, K: GroupBundle, mu: ActionData, basis=None) -> list[Extension]:
    """One extension per class of H²(𝓔, 𝓔_u; K), built as G(ξ) from normalized representatives."""
    if not K.is_abelian:
        raise GroupoidError("abelian K required; use the non-abelian classification")
    ctx = context_for(E, K, mu, basis)
    out = []
    for coords, v in ctx.H2.representatives():
        xi, _ = normalize_cocycle(ctx.cocycle(v))
        out.append(cocycle_to_extension(xi).extension)
    return out


def pullback_coefficients(hom: GroupoidHom, K: GroupBundle, mu: ActionData) -> tuple[GroupBundle, ActionData]:
    """K and its action pulled back along a groupoid map into their base."""
    K2 = GroupBundle({x: K[hom.obj_map[x]] for x in hom.source.objects})
    table = {a: mu.table[hom.arr_map[a]] for a in hom.source.arrows}
    return K2, ActionData(hom.source, K2, table)


def relative_h2(E: FiniteGroupoid, K: GroupBundle, mu: ActionData, basis=None) -> tuple[int, ...]:
    return context_for(E, K, mu, basis=basis).H2.invariants
