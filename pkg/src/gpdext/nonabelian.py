"""Non-abelian 2-cocycles (R, ξ) on embedding categories, their equivalence, and extensions.

Sections of K over a basis set U are tuples of fiber elements aligned with U.
Homomorphisms between section groups are dicts section -> section.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

from .classification import default_liftings, factor_through_image, singleton_arrow
from .embedding import EmbeddingArrow, EmbeddingCategory
from .errors import GroupoidError, GuardExceeded, NotFound, NotNormalError
from .extension import Extension
from .groupoid import FiniteGroupoid, GroupBundle


class SectionGroup:
    """Γ(U, K) as the product of the fibers over U."""

    def __init__(self, K: GroupBundle, U: tuple):
        self.U = U
        self.fibers = tuple(K[x] for x in U)

    @cached_property
    def elements(self) -> list[tuple]:
        return list(itertools.product(*(range(F.order) for F in self.fibers)))

    @property
    def order(self) -> int:
        return math.prod(F.order for F in self.fibers)

    @property
    def identity(self) -> tuple:
        return tuple(F.identity for F in self.fibers)

    def mul(self, a, b) -> tuple:
        return tuple(F.mul(u, v) for F, u, v in zip(self.fibers, a, b))

    def prod(self, *elems) -> tuple:
        out = self.identity
        for e in elems:
            out = self.mul(out, e)
        return out

    def inv(self, a) -> tuple:
        return tuple(F.inv(u) for F, u in zip(self.fibers, a))

    def conj(self, m, a) -> tuple:
        """m a m⁻¹."""
        return self.prod(m, a, self.inv(m))

    @cached_property
    def inner(self) -> list[tuple[tuple, dict]]:
        """One (m, conj_m) per inner automorphism."""
        seen, out = set(), []
        for m in self.elements:
            img = tuple(self.conj(m, a) for a in self.elements)
            if img not in seen:
                seen.add(img)
                out.append((m, dict(zip(self.elements, img))))
        return out

    def is_hom_to(self, other: "SectionGroup", h: dict) -> bool:
        return all(h[self.mul(a, b)] == other.mul(h[a], h[b]) for a in self.elements for b in self.elements)


# bands

@dataclass
class NonAbelianBand:
    cat: EmbeddingCategory
    K: GroupBundle
    rep_hom: dict                      # σ: V -> U  ↦  {section over U: section over V}
    strict_on: frozenset = field(default=frozenset())

    def __post_init__(self):
        self._groups = {}

    def group_at(self, U) -> SectionGroup:
        if U not in self._groups:
            self._groups[U] = SectionGroup(self.K, U)
        return self._groups[U]


def band_from_action(cat: EmbeddingCategory, K: GroupBundle, table: dict | None = None) -> NonAbelianBand:
    """The band of an action (``table[e][k]`` = k·e), strict on the unit sections."""
    E = cat.groupoid
    rep = {}
    for s in cat.arrows:
        rep[s] = _restrict_along(E, K, s, table)
    return NonAbelianBand(cat, K, rep, cat.units)


def _restrict_along(E: FiniteGroupoid, K: GroupBundle, s: EmbeddingArrow, table) -> dict:
    src = SectionGroup(K, s.cod)
    pos = {y: i for i, y in enumerate(s.cod)}
    targets = [pos[E.tgt[e]] for e in s.values]
    out = {}
    for a in src.elements:
        if table is None:
            out[a] = tuple(a[i] for i in targets)
        else:
            out[a] = tuple(table[e][a[i]] for e, i in zip(s.values, targets))
    return out


def validate_band(band: NonAbelianBand) -> list[str]:
    """Representatives are homomorphisms, strict on 𝓓, and functorial up to inner automorphisms."""
    cat = band.cat
    out = []
    for s in cat.arrows:
        if not band.group_at(s.cod).is_hom_to(band.group_at(s.dom), band.rep_hom[s]):
            out.append(f"rep_hom({s}) is not a homomorphism")
    for s in cat.arrows:
        for t in cat.into[s.dom]:
            st = cat.compose[(s, t)]
            W = band.group_at(t.dom)
            comp = {a: band.rep_hom[t][band.rep_hom[s][a]] for a in band.group_at(s.cod).elements}
            target = band.rep_hom[st]
            if s in band.strict_on and t in band.strict_on:
                if comp != target:
                    out.append(f"not strictly functorial on 𝓓 at ({s},{t})")
                continue
            if not any(all(conj[comp[a]] == target[a] for a in comp) for _, conj in W.inner):
                out.append(f"rep_hom not functorial up to inner automorphism at ({s},{t})")
    return out


# cocycles

@dataclass
class NonAbelianCocycle:
    band: NonAbelianBand
    R: dict                 # σ ↦ homomorphism K(cod σ) -> K(dom σ)
    xi: dict                # (σ, τ) ↦ section over dom τ

    @property
    def cat(self):
        return self.band.cat


@dataclass
class ValidationReport:
    ok: bool
    problems: list = field(default_factory=list)
    first_bad_triple: tuple | None = None


def nonabelian_cocycle_validate(c: NonAbelianCocycle, limit: int = 20) -> ValidationReport:
    band, cat = c.band, c.cat
    probs = []
    bad_triple = None
    for s in cat.arrows:
        if not band.group_at(s.cod).is_hom_to(band.group_at(s.dom), c.R[s]):
            probs.append(f"R({s}) is not a homomorphism")
        if s in band.strict_on and c.R[s] != band.rep_hom[s]:
            probs.append(f"R({s}) differs from the band on 𝓓")
    for s in cat.arrows:
        for t in cat.into[s.dom]:
            W = band.group_at(t.dom)
            x = c.xi[(s, t)]
            st = cat.compose[(s, t)]
            if s in band.strict_on and t in band.strict_on and x != W.identity:
                probs.append(f"ξ({s},{t}) ≠ 1 on a 𝓓-pair")
            for a in band.group_at(s.cod).elements:
                if W.conj(x, c.R[t][c.R[s][a]]) != c.R[st][a]:
                    probs.append(f"ξ_* R(τ)R(σ) ≠ R(στ) at ({s},{t})")
                    break
    for r in cat.arrows:
        for s in cat.into[r.dom]:
            rs = cat.compose[(r, s)]
            for t in cat.into[s.dom]:
                st = cat.compose[(s, t)]
                W = band.group_at(t.dom)
                lhs = W.mul(c.xi[(r, st)], c.xi[(s, t)])
                rhs = W.mul(c.xi[(rs, t)], c.R[t][c.xi[(r, s)]])
                if lhs != rhs:
                    probs.append(f"cocycle condition fails at ({r},{s},{t})")
                    if bad_triple is None:
                        bad_triple = (r, s, t)
                if len(probs) >= limit:
                    return ValidationReport(False, probs, bad_triple)
    return ValidationReport(not probs, probs, bad_triple)


def is_normal(c: NonAbelianCocycle) -> bool:
    return all(v == c.band.group_at(t.dom).identity for (s, t), v in c.xi.items() if s in c.band.strict_on)


def abelian_to_nonabelian(xi) -> NonAbelianCocycle:
    """A RelativeCocycle viewed as (R, ξ) with R the action."""
    band = band_from_action(xi.cat, xi.K, xi.action.table)
    return NonAbelianCocycle(band, dict(band.rep_hom), dict(xi.values))


# extensions <-> cocycles

def extension_band(ext: Extension, cat: EmbeddingCategory, liftings: dict | None = None) -> NonAbelianBand:
    c = extension_to_nonabelian(ext, cat, liftings)
    return c.band


def extension_to_nonabelian(ext: Extension, cat: EmbeddingCategory, liftings: dict | None = None) -> NonAbelianCocycle:
    """R(σ)(α)(x) = σ~(x)⁻¹ α(tσ(x)) σ~(x) and ξ(σ,τ)(x) = (στ)~(x)⁻¹ σ~(y) τ~(x)."""
    if liftings is None:
        liftings = default_liftings(ext, cat)
    G, E, K = ext.G, ext.E, ext.K
    for s, lifts in liftings.items():
        if any(ext.pi[g] != e for e, g in zip(s.values, lifts)):
            raise GroupoidError(f"lifting of {s} does not cover it")
        if s in cat.units and any(not G.is_unit(g) for g in lifts):
            raise GroupoidError(f"unit section {s} must be lifted to units")
    R = {}
    for s in cat.arrows:
        src = SectionGroup(K, s.cod)
        pos = {y: i for i, y in enumerate(s.cod)}
        hom = {}
        for a in src.elements:
            img = []
            for x, e, g in zip(s.dom, s.values, liftings[s]):
                y = E.tgt[e]
                k = G.chain(G.inv(g), ext.j[y][a[pos[y]]], g)
                img.append(ext.kernel_index[k])
            hom[a] = tuple(img)
        R[s] = hom
    xi = {}
    for s in cat.arrows:
        ls = dict(zip(s.dom, liftings[s]))
        for t in cat.into[s.dom]:
            st = cat.compose[(s, t)]
            row = []
            for x, e, g, g12 in zip(t.dom, t.values, liftings[t], liftings[st]):
                row.append(ext.kernel_index[G.chain(G.inv(g12), ls[E.tgt[e]], g)])
            xi[(s, t)] = tuple(row)
    band = NonAbelianBand(cat, K, dict(R), cat.units)
    return NonAbelianCocycle(band, R, xi)


def nonabelian_to_extension(c: NonAbelianCocycle) -> Extension:
    """G(R, ξ): arrows [e, k] with [f,l][e,k] = [fe, ξ(f,e)(x)·R(e)(l)·k] on singleton arrows."""
    if not is_normal(c):
        raise NotNormalError("cocycle must be normal")
    cat, K = c.cat, c.band.K
    E = cat.groupoid
    name = {}
    arrows = {}
    for e in E.arrows:
        x = E.src[e]
        for k in K[x]:
            nm = f"[{e},{K[x].label(k)}]"
            name[(e, k)] = nm
            arrows[nm] = (x, E.tgt[e])
    compose = {}
    for (f, e), fe in E.compose.items():
        x, y = E.src[e], E.tgt[e]
        sf, se = singleton_arrow(E, f), singleton_arrow(E, e)
        xi = c.xi[(sf, se)][0]
        Re = c.R[se]
        Kx = K[x]
        for l in K[y]:
            rl = Re[(l,)][0]
            for k in Kx:
                compose[(name[(f, l)], name[(e, k)])] = name[(fe, Kx.prod(xi, rl, k))]
    units = {x: name[(E.units[x], K[x].identity)] for x in E.objects}
    G = FiniteGroupoid(E.objects, arrows, compose, units)
    j = {x: tuple(name[(E.units[x], k)] for k in K[x]) for x in E.objects}
    pi = {name[(e, k)]: e for e in E.arrows for k in K[E.src[e]]}
    return Extension(K, G, E, j, pi)


# equivalence

@dataclass
class EquivalenceWitness:
    mu: dict          # U ↦ m_U, μ_U = conjugation by m_U
    f: dict           # σ ↦ section over dom σ


def _search_size(band: NonAbelianBand) -> int:
    cat = band.cat
    size = 1
    for U in cat.objects:
        size *= len(band.group_at(U).inner)
    for s in cat.arrows:
        size *= band.group_at(s.dom).order
    return size


def nonabelian_equivalent(c1: NonAbelianCocycle, c2: NonAbelianCocycle,
                          guard: int = 10 ** 8) -> EquivalenceWitness | None:
    """Inner μ_U and f(σ) with S(σ) = f(σ)_* μ_V R(σ) μ_U⁻¹ and
    μ_W ξ(σ,τ) = f(στ)⁻¹ ζ(σ,τ) S(τ)(f(σ)) f(τ), where c1 = (R, ξ), c2 = (S, ζ)."""
    band, cat = c1.band, c1.cat
    size = _search_size(band)
    if size > guard:
        raise GuardExceeded(size, guard, "equivalence search space")
    R, xi, S, zeta = c1.R, c1.xi, c2.R, c2.xi
    objs = list(cat.objects)
    arrows = _arrow_order(cat)
    pos = {s: i for i, s in enumerate(arrows)}
    # pair (σ,τ) is checked once σ, τ and στ all have f-values
    pair_checks: dict = {}
    for s in cat.arrows:
        for t in cat.into[s.dom]:
            st = cat.compose[(s, t)]
            pair_checks.setdefault(max(pos[s], pos[t], pos[st]), []).append((s, t, st))
    f: dict = {}

    def first_relation(s, mu):
        V, U = band.group_at(s.dom), band.group_at(s.cod)
        mV, mU = mu[s.dom], mu[s.cod]
        mUi = U.inv(mU)
        fs = f[s]
        for a in U.elements:
            inner = R[s][U.prod(mUi, a, mU)]
            if S[s][a] != V.conj(fs, V.conj(mV, inner)):
                return False
        return True

    def second_relation(s, t, st, mu):
        W = band.group_at(t.dom)
        lhs = W.conj(mu[t.dom], xi[(s, t)])
        rhs = W.prod(W.inv(f[st]), zeta[(s, t)], S[t][f[s]], f[t])
        return lhs == rhs

    def rec(i, mu):
        if i == len(arrows):
            return True
        s = arrows[i]
        for v in band.group_at(s.dom).elements:
            f[s] = v
            if not first_relation(s, mu):
                continue
            if all(second_relation(a, b, ab, mu) for a, b, ab in pair_checks.get(i, ())):
                if rec(i + 1, mu):
                    return True
        del f[s]
        return False

    for choice in itertools.product(*(band.group_at(U).inner for U in objs)):
        mu = {U: m for U, (m, _) in zip(objs, choice)}
        f.clear()
        if rec(0, mu):
            return EquivalenceWitness(dict(mu), dict(f))
    return None


def _arrow_order(cat) -> list:
    """Units first, then by domain size, so pair checks close early."""
    return sorted(cat.arrows, key=lambda s: (s not in cat.units, len(s.dom), s))


def perturb(c: NonAbelianCocycle, mu: dict, f: dict) -> NonAbelianCocycle:
    """The two-step change: conjugate by μ, then twist by f."""
    band, cat = c.band, c.cat
    R1, xi1 = {}, {}
    for s in cat.arrows:
        V, U = band.group_at(s.dom), band.group_at(s.cod)
        mV, mU = mu[s.dom], mu[s.cod]
        R1[s] = {a: V.conj(mV, c.R[s][U.prod(U.inv(mU), a, mU)]) for a in U.elements}
    for (s, t), v in c.xi.items():
        xi1[(s, t)] = band.group_at(t.dom).conj(mu[t.dom], v)
    R2, xi2 = {}, {}
    for s in cat.arrows:
        V = band.group_at(s.dom)
        R2[s] = {a: V.conj(f[s], b) for a, b in R1[s].items()}
    for (s, t), v in xi1.items():
        W = band.group_at(t.dom)
        st = cat.compose[(s, t)]
        xi2[(s, t)] = W.prod(f[st], v, R1[t][band.group_at(s.dom).inv(f[s])], W.inv(f[t]))
    return NonAbelianCocycle(band, R2, xi2)


def check_witness(c1: NonAbelianCocycle, c2: NonAbelianCocycle, w: EquivalenceWitness) -> bool:
    """Recheck both relations for a witness (independent of the search order)."""
    band, cat = c1.band, c1.cat
    for s in cat.arrows:
        V, U = band.group_at(s.dom), band.group_at(s.cod)
        for a in U.elements:
            inner = c1.R[s][U.prod(U.inv(w.mu[s.cod]), a, w.mu[s.cod])]
            if c2.R[s][a] != V.conj(w.f[s], V.conj(w.mu[s.dom], inner)):
                return False
    for (s, t), v in c1.xi.items():
        W = band.group_at(t.dom)
        st = cat.compose[(s, t)]
        if W.conj(w.mu[t.dom], v) != W.prod(W.inv(w.f[st]), c2.xi[(s, t)], c2.R[t][w.f[s]], w.f[t]):
            return False
    return True


# gerbes

@dataclass
class GerbePresheaf:
    """𝒢(U): objects are isomorphisms ρ: U ≅ W in the category, arrows ρ1 -> ρ2 are
    sections a over U with a(x): tρ1(x) -> tρ2(x) in G and π(a(x))ρ1(x) = ρ2(x)."""
    extension: Extension
    cat: EmbeddingCategory
    objects_at: dict            # U ↦ list of isomorphisms out of U
    marked: dict                # U ↦ identity of U

    def hom(self, rho1: EmbeddingArrow, rho2: EmbeddingArrow) -> list[tuple]:
        ext = self.extension
        E = self.cat.groupoid
        choices = []
        for x in rho1.dom:
            e = E.mul(rho2.at(x), E.inv(rho1.at(x)))
            choices.append(ext.fibers[e])
        return [tuple(c) for c in itertools.product(*choices)]

    def compose(self, b: tuple, a: tuple) -> tuple:
        G = self.extension.G
        return tuple(G.mul(v, u) for v, u in zip(b, a))

    def restrict_object(self, s: EmbeddingArrow, rho: EmbeddingArrow) -> EmbeddingArrow:
        """σ*(ρ) = ρ∘σ corestricted to its image; σ must land in dom ρ."""
        return factor_through_image(self.cat, self.cat.compose[(rho, s)])[1]

    def restrict_arrow(self, s: EmbeddingArrow, a: tuple) -> tuple:
        """Pull back along σ: the value at x' is the value at tσ(x')."""
        E = self.cat.groupoid
        pos = {y: i for i, y in enumerate(s.cod)}
        return tuple(a[pos[E.tgt[e]]] for e in s.values)

    def theta(self, U, a: tuple) -> tuple:
        """Aut(1_U) -> Γ(U, K)."""
        return tuple(self.extension.kernel_index[g] for g in a)


def gerbe_from_extension(ext: Extension, cat: EmbeddingCategory) -> GerbePresheaf:
    objects_at = {}
    for U in cat.objects:
        objects_at[U] = [a for a in cat.out_of[U] if len(set(a.cod)) == len(a.dom) and _image(cat, a) == set(a.cod)]
    marked = {U: cat.identity[U] for U in cat.objects}
    return GerbePresheaf(ext, cat, objects_at, marked)


def _image(cat, a):
    return {cat.groupoid.tgt[e] for e in a.values}


def gerbe_problems(g: GerbePresheaf) -> list[str]:
    """Nonempty, transitive, and Aut(1_U) ≅ Γ(U, K)."""
    out = []
    K = g.extension.K
    for U, objs in g.objects_at.items():
        if not objs:
            out.append(f"𝒢({U}) is empty")
            continue
        for r1 in objs:
            for r2 in objs:
                if not g.hom(r1, r2):
                    out.append(f"𝒢({U}) not transitive: no arrow {r1} -> {r2}")
        auts = g.hom(g.marked[U], g.marked[U])
        if len(auts) != SectionGroup(K, U).order:
            out.append(f"Aut(1_{U}) has the wrong order")
    return out


def cocycle_from_gerbe(g: GerbePresheaf, theta: dict | None = None, choices: dict | None = None) -> NonAbelianCocycle:
    """ξ(σ,τ) = θ_W((στ)~⁻¹ τ*(σ~) τ~) with R(σ) = θ_V σ~* θ_U⁻¹ (the square commutes by definition).

    ``theta[U]`` optionally post-composes θ_U with an automorphism of Γ(U, K) (a dict);
    ``choices[σ]`` is an arrow 1_V -> σ*(1_U) in 𝒢(V), unit on 𝓓.
    """
    cat, ext = g.cat, g.extension
    G, E, K = ext.G, cat.groupoid, ext.K
    if choices is None:
        choices = default_liftings(ext, cat)
    for s in cat.arrows:
        target = factor_through_image(cat, s)[1]
        if choices[s] not in g.hom(g.marked[s.dom], target):
            raise NotFound(f"choice for {s} is not an arrow 1 -> σ*(1)")
        if s in cat.units and any(not G.is_unit(a) for a in choices[s]):
            raise GroupoidError(f"choice for the unit section {s} must be the identity")

    def th(U, a):
        val = g.theta(U, a)
        return theta[U][val] if theta else val

    def th_inv(U, k):
        if theta:
            inv = {v: u for u, v in theta[U].items()}
            k = inv[k]
        return tuple(ext.j[x][v] for x, v in zip(U, k))

    R = {}
    for s in cat.arrows:
        src = SectionGroup(K, s.cod)
        hom = {}
        for k in src.elements:
            alpha = th_inv(s.cod, k)
            pulled = g.restrict_arrow(s, alpha)
            lifted = tuple(G.chain(G.inv(c), p, c) for c, p in zip(choices[s], pulled))
            hom[k] = th(s.dom, lifted)
        R[s] = hom
    xi = {}
    for s in cat.arrows:
        for t in cat.into[s.dom]:
            st = cat.compose[(s, t)]
            pulled = g.restrict_arrow(t, choices[s])
            xi0 = tuple(G.chain(G.inv(a), b, c) for a, b, c in zip(choices[st], pulled, choices[t]))
            xi[(s, t)] = th(t.dom, xi0)
    band = NonAbelianBand(cat, K, dict(R), cat.units)
    return NonAbelianCocycle(band, R, xi)


# class enumeration

def nonabelian_classes(band: NonAbelianBand, guard: int = 10 ** 8) -> list[NonAbelianCocycle]:
    """Representatives of the equivalence classes of relative cocycles with this band."""
    cat = band.cat
    free = [s for s in sorted(cat.arrows) if s not in band.strict_on]
    R_choices = []
    for s in free:
        V = band.group_at(s.dom)
        reps = []
        seen = set()
        for _, conj in V.inner:
            h = {a: conj[b] for a, b in band.rep_hom[s].items()}
            key = tuple(sorted(h.items()))
            if key not in seen:
                seen.add(key)
                reps.append(h)
        R_choices.append(reps)
    pairs = [(s, t) for s in sorted(cat.arrows) for t in sorted(cat.into[s.dom])]
    xi_pairs = [p for p in pairs if not (p[0] in band.strict_on and p[1] in band.strict_on)]
    size = math.prod(len(c) for c in R_choices) * math.prod(band.group_at(t.dom).order for _, t in xi_pairs)
    triples = [(r, s, t) for r, s in pairs for t in cat.into[s.dom]]
    idx = {p: i for i, p in enumerate(xi_pairs)}
    checks: dict = {}
    for r, s, t in triples:
        keys = [(r, cat.compose[(s, t)]), (s, t), (cat.compose[(r, s)], t), (r, s)]
        last = max((idx[k] for k in keys if k in idx), default=-1)
        checks.setdefault(last, []).append((r, s, t))
    pair_checks: dict = {}
    for s, t in pairs:
        pair_checks.setdefault(idx.get((s, t), -1), []).append((s, t))
    counter = [0]
    found: list[NonAbelianCocycle] = []

    def xi_of(p):
        return xi[p] if p in xi else band.group_at(p[1].dom).identity

    def pair_ok(s, t):
        W = band.group_at(t.dom)
        st = cat.compose[(s, t)]
        x = xi_of((s, t))
        return all(W.conj(x, R[t][R[s][a]]) == R[st][a] for a in band.group_at(s.cod).elements)

    def triple_ok(r, s, t):
        W = band.group_at(t.dom)
        st, rs = cat.compose[(s, t)], cat.compose[(r, s)]
        return W.mul(xi_of((r, st)), xi_of((s, t))) == W.mul(xi_of((rs, t)), R[t][xi_of((r, s))])

    def ok(i):
        return all(pair_ok(*p) for p in pair_checks.get(i, ())) and all(triple_ok(*t) for t in checks.get(i, ()))

    def rec(i):
        counter[0] += 1
        if counter[0] > guard:
            raise GuardExceeded(size, guard, "cocycle search space")
        if i == len(xi_pairs):
            c = NonAbelianCocycle(band, dict(R), {p: xi_of(p) for p in pairs})
            if not any(nonabelian_equivalent(c, d, guard) is not None for d in found):
                found.append(c)
            return
        p = xi_pairs[i]
        for v in band.group_at(p[1].dom).elements:
            xi[p] = v
            if ok(i):
                rec(i + 1)
        del xi[p]

    for combo in itertools.product(*R_choices):
        R = {s: band.rep_hom[s] for s in cat.arrows if s in band.strict_on}
        R.update(zip(free, combo))
        xi: dict = {}
        if ok(-1):
            rec(0)
    return found
