"""Extensions K -> G -> E of finite groupoids and the operations on them.

``j[x][k]`` is the G-arrow embedding k in K_x; ``pi[g]`` is the E-arrow under g.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .errors import GroupoidError, NotFound
from .groupoid import (FiniteGroupoid, GroupBundle, full_subgroupoid, isotropy, orbits,
                       validate_groupoid)
from .groups import FiniteGroup
from .torsor import (Bitorsor, _division_idx, conjugation_by_section, inverse_name,
                     trivial_torsor, _UnionFind)


@dataclass(eq=False)
class Extension:
    K: GroupBundle
    G: FiniteGroupoid
    E: FiniteGroupoid
    j: dict
    pi: dict

    @property
    def objects(self) -> tuple:
        return self.E.objects

    @cached_property
    def fibers(self) -> dict:
        out: dict = {e: [] for e in self.E.arrows}
        for g in self.G.arrows:
            out[self.pi[g]].append(g)
        return {e: tuple(sorted(v)) for e, v in out.items()}

    @cached_property
    def kernel_index(self) -> dict:
        """G-arrow -> k for arrows in the image of j."""
        return {g: k for x in self.j for k, g in enumerate(self.j[x])}

    def lift(self, e: str) -> str:
        """The least-named arrow over e."""
        return self.fibers[e][0]

    def divide(self, g: str, h: str) -> int:
        """The k in K_{tgt} with g = j(k)·h, for g, h in one fiber."""
        return self.kernel_index[self.G.mul(g, self.G.inv(h))]


@dataclass
class ActionData:
    """``table[e][k]`` is k·e in K_{src e}, for e: x -> y and k in K_y."""
    E: FiniteGroupoid
    K: GroupBundle
    table: dict

    def act(self, k: int, e: str) -> int:
        return self.table[e][k]

    def __eq__(self, other):
        return isinstance(other, ActionData) and self.table == other.table


@dataclass
class ExtensionMorphism:
    source: Extension
    target: Extension
    arrows: dict
    bundle: dict           # x -> tuple, K_x -> K'_x

    def __call__(self, g):
        return self.arrows[g]


# validation

def validate_extension(ext: Extension) -> list[str]:
    out = []
    G, E, K = ext.G, ext.E, ext.K
    out += [f"G: {m}" for m in validate_groupoid(G)]
    out += [f"E: {m}" for m in validate_groupoid(E)]
    if out:
        return out
    if set(G.objects) != set(E.objects) or set(K.base) != set(E.objects):
        return ["G, E and K must live over the same objects"]
    for g in G.arrows:
        e = ext.pi.get(g)
        if e is None or e not in E.src:
            out.append(f"π undefined at {g}")
        elif E.src[e] != G.src[g] or E.tgt[e] != G.tgt[g]:
            out.append(f"π({g}) has the wrong ends")
    if out:
        return out
    for x in G.objects:
        if ext.pi[G.units[x]] != E.units[x]:
            out.append(f"π does not preserve the unit at {x}")
    for (g, h), gh in G.compose.items():
        if E.compose[(ext.pi[g], ext.pi[h])] != ext.pi[gh]:
            out.append(f"π not multiplicative at ({g},{h})")
            break
    for e in E.arrows:
        if not ext.fibers[e]:
            out.append(f"π is not surjective: nothing over {e}")
    image = set()
    for x in K.base:
        grp = K[x]
        emb = ext.j.get(x)
        if emb is None or len(emb) != grp.order or len(set(emb)) != grp.order:
            out.append(f"j is not injective at {x}")
            continue
        for k, g in enumerate(emb):
            if G.src[g] != x or G.tgt[g] != x:
                out.append(f"j({k}) at {x} is not in the isotropy")
        if emb[grp.identity] != G.units[x]:
            out.append(f"j does not preserve the unit at {x}")
        for a in range(grp.order):
            for b in range(grp.order):
                if G.compose.get((emb[a], emb[b])) != emb[grp.mul(a, b)]:
                    out.append(f"j is not a homomorphism at {x}")
                    break
            else:
                continue
            break
        image.update(emb)
    if out:
        return out
    for g in G.arrows:
        if E.is_unit(ext.pi[g]) != (g in image):
            out.append(f"exactness fails at {g}")
    for e in E.arrows:
        y = E.tgt[e]
        fib = set(ext.fibers[e])
        g0 = ext.fibers[e][0]
        if {G.mul(ext.j[y][k], g0) for k in range(K[y].order)} != fib:
            out.append(f"K_{y} does not act freely and transitively on the fiber over {e}")
    for g in G.arrows:
        x, y = G.src[g], G.tgt[g]
        gi = G.inv(g)
        jx = set(ext.j[x])
        for a in ext.j[y]:
            if G.chain(gi, a, g) not in jx:
                out.append(f"j(K) is not normal under {g}")
                break
    return out


def require_extension(ext: Extension) -> None:
    rep = validate_extension(ext)
    if rep:
        raise GroupoidError("invalid extension: " + "; ".join(rep[:5]))


def induced_action(ext: Extension) -> ActionData:
    """k·e = j⁻¹(g⁻¹ j(k) g) for any lift g of e; checks independence of the lift."""
    if not ext.K.is_abelian:
        raise GroupoidError("the induced action depends on the lift for non-abelian K")
    G = ext.G
    table = {}
    for e in ext.E.arrows:
        y = ext.E.tgt[e]
        vals = None
        for g in ext.fibers[e]:
            gi = G.inv(g)
            row = tuple(ext.kernel_index[G.chain(gi, ext.j[y][k], g)] for k in range(ext.K[y].order))
            if vals is None:
                vals = row
            elif vals != row:
                raise GroupoidError(f"action over {e} depends on the lift")
        table[e] = vals
    return ActionData(ext.E, ext.K, table)


def lift_action(ext: Extension) -> ActionData:
    """Conjugation by the least lift of each arrow; for non-abelian K only its outer class is canonical."""
    G = ext.G
    table = {}
    for e in ext.E.arrows:
        y, g = ext.E.tgt[e], ext.lift(e)
        table[e] = tuple(ext.kernel_index[G.chain(G.inv(g), ext.j[y][k], g)] for k in range(ext.K[y].order))
    return ActionData(ext.E, ext.K, table)


def validate_action(mu: ActionData) -> list[str]:
    out = []
    E, K = mu.E, mu.K
    for e in E.arrows:
        x, y = E.src[e], E.tgt[e]
        row = mu.table[e]
        if sorted(row) != list(range(K[x].order)) or K[x].order != K[y].order:
            out.append(f"action by {e} is not a bijection")
            continue
        if any(row[K[y].mul(a, b)] != K[x].mul(row[a], row[b]) for a in range(K[y].order) for b in range(K[y].order)):
            out.append(f"action by {e} is not a homomorphism")
    for x in E.objects:
        if mu.table[E.units[x]] != tuple(range(K[x].order)):
            out.append(f"unit at {x} acts nontrivially")
    for (e, f), ef in E.compose.items():
        y = E.tgt[e]
        if any(mu.table[ef][k] != mu.table[f][mu.table[e][k]] for k in range(K[y].order)):
            out.append(f"action not functorial at ({e},{f})")
            break
    return out


def trivial_action(E: FiniteGroupoid, K: GroupBundle) -> ActionData:
    return ActionData(E, K, {e: tuple(range(K[E.tgt[e]].order)) for e in E.arrows})


def is_central(ext: Extension) -> bool:
    G = ext.G
    for g in G.arrows:
        x, y = G.src[g], G.tgt[g]
        if not _same_group(ext.K[x], ext.K[y]):
            return False
        for k in range(ext.K[x].order):
            if G.mul(g, ext.j[x][k]) != G.mul(ext.j[y][k], g):
                return False
    return True


def _same_group(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a.table == b.table


# morphisms and isomorphism search

def validate_morphism(phi: ExtensionMorphism) -> list[str]:
    A, B = phi.source, phi.target
    out = []
    f = phi.arrows
    if set(f) != set(A.G.arrows):
        return ["arrow map is not total"]
    if len(set(f.values())) != len(f) or set(f.values()) != set(B.G.arrows):
        out.append("arrow map is not a bijection")
    for g in A.G.arrows:
        if B.pi[f[g]] != A.pi[g]:
            out.append(f"π not preserved at {g}")
            break
    for (g, h), gh in A.G.compose.items():
        if B.G.compose.get((f[g], f[h])) != f[gh]:
            out.append(f"not multiplicative at ({g},{h})")
            break
    for x in A.K.base:
        for k in range(A.K[x].order):
            if f[A.j[x][k]] != B.j[x][phi.bundle[x][k]]:
                out.append(f"j not preserved at {x}")
                break
    return out


@dataclass
class _Presentation:
    roots: dict             # object -> orbit root
    tree: dict              # object -> E-arrow root -> object
    gens: list              # E-arrows: tree arrows then isotropy generators
    words: dict             # E-arrow -> (tree_y, word over isotropy gens, tree_x)
    iso_gens: dict          # root -> tuple of E-arrows


def _present(E: FiniteGroupoid) -> _Presentation:
    roots, tree, iso_gens, iso_words = {}, {}, {}, {}
    gens = []
    for block in orbits(E):
        r = block[0]
        for x in block:
            roots[x] = r
            tree[x] = E.units[r] if x == r else min(E.hom(r, x))
            if x != r:
                gens.append(tree[x])
        grp = isotropy(E, r)
        gen_arrows = tuple(grp.label(g) for g in grp.generators)
        iso_gens[r] = gen_arrows
        gens.extend(gen_arrows)
        iso_words[r] = {grp.label(h): tuple(grp.label(g) for g in word) for h, word in grp.words().items()}
    words = {}
    for e in E.arrows:
        x, y = E.src[e], E.tgt[e]
        r = roots[x]
        h = E.chain(E.inv(tree[y]), e, tree[x])
        words[e] = (tree[y], iso_words[r][h], tree[x])
    return _Presentation(roots, tree, gens, words, iso_gens)


def _lift_all(ext: Extension, pres: _Presentation, chosen: dict) -> dict:
    """A lift of every E-arrow built from the chosen generator lifts."""
    G, E = ext.G, ext.E
    out = {}
    for e, (ty, word, tx) in pres.words.items():
        r = pres.roots[E.src[e]]
        acc = G.units[r]
        for a in word:
            acc = G.mul(acc, chosen[a])
        ly = chosen[ty] if not E.is_unit(ty) else G.units[E.tgt[ty]]
        lx = chosen[tx] if not E.is_unit(tx) else G.units[E.tgt[tx]]
        out[e] = G.chain(ly, acc, G.inv(lx))
    return out


def _check_hom(A: Extension, B: Extension, f: dict) -> bool:
    for (g, h), gh in A.G.compose.items():
        if B.G.compose.get((f[g], f[h])) != f[gh]:
            return False
    return True


def extension_isomorphisms(A: Extension, B: Extension, bundle: dict | None = None, first_only: bool = True):
    """Isomorphisms A -> B over the identity of E inducing ``bundle`` on K (default identity)."""
    if set(A.E.arrows) != set(B.E.arrows) or A.E.compose != B.E.compose:
        return []
    if bundle is None:
        if any(A.K[x].order != B.K[x].order for x in A.K.base):
            return []
        bundle = {x: tuple(range(A.K[x].order)) for x in A.K.base}
    if len(A.G.arrows) != len(B.G.arrows):
        return []
    pres = _present(A.E)
    refA = {e: A.lift(e) for e in pres.gens}
    liftA = _lift_all(A, pres, refA)
    abelian = A.K.is_abelian
    choice_lists = []
    tree = {pres.tree[x] for x in pres.tree if x != pres.roots[x]}
    for e in pres.gens:
        if abelian and e in tree:
            choice_lists.append((B.lift(e),))  # a gauge change fixes tree lifts
        else:
            choice_lists.append(B.fibers[e])
    found = []
    for choice in itertools.product(*choice_lists):
        chosen = dict(zip(pres.gens, choice))
        liftB = _lift_all(B, pres, chosen)
        f = {}
        for g in A.G.arrows:
            e = A.pi[g]
            y = A.E.tgt[e]
            k = A.kernel_index[A.G.mul(g, A.G.inv(liftA[e]))]
            f[g] = B.G.mul(B.j[y][bundle[y][k]], liftB[e])
        if len(set(f.values())) != len(f):
            continue
        if not _check_hom(A, B, f):
            continue
        found.append(ExtensionMorphism(A, B, f, bundle))
        if first_only:
            break
    return found


def extensions_isomorphic(A: Extension, B: Extension, bundle: dict | None = None) -> ExtensionMorphism | None:
    found = extension_isomorphisms(A, B, bundle)
    return found[0] if found else None


def identity_morphism(ext: Extension) -> ExtensionMorphism:
    return ExtensionMorphism(ext, ext, {g: g for g in ext.G.arrows},
                             {x: tuple(range(ext.K[x].order)) for x in ext.K.base})


def compose_morphisms(psi: ExtensionMorphism, phi: ExtensionMorphism) -> ExtensionMorphism:
    """psi ∘ phi."""
    return ExtensionMorphism(phi.source, psi.target, {g: psi.arrows[phi.arrows[g]] for g in phi.arrows},
                             {x: tuple(psi.bundle[x][k] for k in phi.bundle[x]) for x in phi.bundle})


# twisting

@dataclass
class TwistedExtension:
    extension: Extension
    bitorsor: Bitorsor
    base: Extension
    base_points: dict      # x -> index of the fixed point of P_x
    names: dict            # (x, g', y) canonical triple -> arrow name

    def normalize(self, q: int, g: str, p: int) -> str:
        """Arrow name of the class of q⊗g⊗p⁻¹ (indices into the fibers of P)."""
        ext, P = self.base, self.bitorsor
        x, y = ext.G.src[g], ext.G.tgt[g]
        a = _division_idx(P, y, q, self.base_points[y])     # q·a = q0
        b = _division_idx(P, x, p, self.base_points[x])     # p·b = p0
        ja = ext.G.inv(ext.j[y][a])
        g2 = ext.G.chain(ja, g, ext.j[x][b])
        return self.names[g2]


def twist(P: Bitorsor, ext: Extension) -> TwistedExtension:
    """P ⊗ G ⊗ P⁻¹ as an extension of E by the left bundle of P."""
    K = ext.K
    for x in K.base:
        if not _same_group(P.right_bundle[x], K[x]):
            raise GroupoidError(f"bitorsor's right group differs from K at {x}")
    L = P.left_bundle
    G = ext.G
    base = {x: 0 for x in P.base}
    names = {}
    for g in G.arrows:
        x, y = G.src[g], G.tgt[g]
        names[g] = f"{P.points[y][0]}⊗{g}⊗{inverse_name(P.points[x][0])}"
    arrows = {names[g]: (G.src[g], G.tgt[g]) for g in G.arrows}
    tw = TwistedExtension(None, P, ext, base, names)
    # canonical triples (q0, g, p0); composition (r,h,s)(q,g,p) = (r, h j(δ(s,q)) g, p) with s = q = q0
    compose = {(names[h], names[g]): names[G.mul(h, g)] for (h, g) in G.compose}
    units = {x: names[G.units[x]] for x in G.objects}
    GP = FiniteGroupoid(G.objects, arrows, compose, units)
    j = {}
    for x in P.base:
        q0 = base[x]
        j[x] = tuple(tw.normalize(P.left[x][l][q0], G.units[x], q0) for l in range(L[x].order))
    pi = {names[g]: ext.pi[g] for g in G.arrows}
    tw.extension = Extension(L, GP, ext.E, j, pi)
    return tw


def section_isomorphism(tw: TwistedExtension, beta: dict) -> ExtensionMorphism:
    """β̂(g) = β(y)⊗g⊗β(x)⁻¹ and β̄ = conjugation by β, for a total section β (names)."""
    P, ext = tw.bitorsor, tw.base
    if set(beta) != set(P.base):
        raise GroupoidError("section must be total")
    idx = {x: P.index(x, beta[x]) for x in P.base}
    f = {g: tw.normalize(idx[ext.G.tgt[g]], g, idx[ext.G.src[g]]) for g in ext.G.arrows}
    return ExtensionMorphism(ext, tw.extension, f, conjugation_by_section(P, beta))


def restricted_section_arrows(tw: TwistedExtension, alpha: dict) -> dict:
    """α̂ on the arrows of G between points of the domain of α."""
    P, ext = tw.bitorsor, tw.base
    dom = set(alpha)
    idx = {x: P.index(x, alpha[x]) for x in alpha}
    return {g: tw.normalize(idx[ext.G.tgt[g]], g, idx[ext.G.src[g]])
            for g in ext.G.arrows if ext.G.src[g] in dom and ext.G.tgt[g] in dom}


def recover_section(tw: TwistedExtension, u: dict, alpha: dict) -> dict:
    """The unique total β extending α with β̂ = u (u an arrow map G -> P⊗G⊗P⁻¹)."""
    P, ext = tw.bitorsor, tw.base
    G = ext.G
    T = set(alpha)
    want = restricted_section_arrows(tw, alpha)
    for g, h in want.items():
        if u[g] != h:
            raise NotFound(f"u does not restrict to the section's isomorphism at {g}")
    beta = dict(alpha)
    for x in G.objects:
        if x in T:
            continue
        to_T = [g for g in G.out_of(x) if G.tgt[g] in T]
        if not to_T:
            raise GroupoidError(f"no arrow from {x} into the transversal")
        g = min(to_T)
        t = G.tgt[g]
        qi = P.index(t, alpha[t])
        hits = [p for p in range(len(P.points[x])) if tw.normalize(qi, g, p) == u[g]]
        if len(hits) != 1:
            raise NotFound(f"no point of P over {x} matches u at {g}")
        beta[x] = P.points[x][hits[0]]
    idx = {x: P.index(x, beta[x]) for x in beta}
    for g in G.arrows:
        if tw.normalize(idx[G.tgt[g]], g, idx[G.src[g]]) != u[g]:
            raise NotFound(f"recovered section disagrees with u at {g}")
    return beta


# the connecting bitorsor

@dataclass
class ConnectingData:
    bitorsor: Bitorsor
    alpha: dict
    twisted: TwistedExtension
    psi: ExtensionMorphism
    classes: dict          # x -> {(g, h): class index}
    reps: dict             # x -> list of (g, h)


def connecting_bitorsor(extG: Extension, extH: Extension, phi: dict, T) -> ConnectingData:
    """Bitorsor of pairs (g: t->x in G, h: x->t in H) with π(g)ρ(h) = 1, modulo (gφ(f), f⁻¹h).

    ``phi`` maps arrows of H between points of T to arrows of G.
    """
    T = sorted(T)
    Gg, Hg, E = extG.G, extH.G, extG.E
    Tset = set(T)
    for h, g in phi.items():
        if extG.pi[g] != extH.pi[h]:
            raise GroupoidError(f"φ does not cover the identity of E at {h}")
    for (a, b), ab in Hg.compose.items():
        if a in phi and b in phi and Gg.compose.get((phi[a], phi[b])) != phi[ab]:
            raise GroupoidError(f"φ is not multiplicative at ({a},{b})")
    pts, R, Lt, cls_all, reps_all = {}, {}, {}, {}, {}
    K = extG.K
    for x in E.objects:
        pairs = []
        for t in T:
            for g in Gg.hom(t, x):
                for h in Hg.hom(x, t):
                    if E.is_unit(E.mul(extG.pi[g], extH.pi[h])):
                        pairs.append((g, h))
        pairs.sort()
        pos = {p: i for i, p in enumerate(pairs)}
        uf = _UnionFind(len(pairs))
        for (g, h) in pairs:
            t = Gg.src[g]
            for f in Hg.into(t):
                if Hg.src[f] in Tset:
                    uf.union(pos[(g, h)], pos[(Gg.mul(g, phi[f]), Hg.mul(Hg.inv(f), h))])
        roots = sorted({uf.find(i) for i in range(len(pairs))})
        index = {r: c for c, r in enumerate(roots)}
        cls = {p: index[uf.find(i)] for i, p in enumerate(pairs)}
        reps = [pairs[r] for r in roots]
        cls_all[x], reps_all[x] = cls, reps
        pts[x] = tuple(f"{g}⊗{h}" for g, h in reps)
        n = K[x].order
        R[x] = [[cls[(g, Hg.mul(h, extH.j[x][k]))] for k in range(n)] for g, h in reps]
        Lt[x] = [[cls[(Gg.mul(extG.j[x][k], g), h)] for g, h in reps] for k in range(n)]
    P = Bitorsor(pts, K, K, R, Lt)
    alpha = {t: pts[t][cls_all[t][(Gg.units[t], Hg.units[t])]] for t in T}
    tw = twist(P, extH)
    # ψ(q⊗h⊗p⁻¹) = g2 φ(h2 h h1⁻¹) g1⁻¹ evaluated on canonical triples
    f = {}
    for h in Hg.arrows:
        x, y = Hg.src[h], Hg.tgt[h]
        g1, h1 = reps_all[x][tw.base_points[x]]
        g2, h2 = reps_all[y][tw.base_points[y]]
        core = Hg.chain(h2, h, Hg.inv(h1))
        f[tw.names[h]] = Gg.chain(g2, phi[core], Gg.inv(g1))
    psi = ExtensionMorphism(tw.extension, extG, f, {x: tuple(range(K[x].order)) for x in K.base})
    return ConnectingData(P, alpha, tw, psi, cls_all, reps_all)


def check_connecting(cd: ConnectingData, phi: dict) -> list[str]:
    """ψ is an isomorphism of extensions, α is central and ψ∘α̂ = φ arrow by arrow."""
    from .torsor import is_central, validate_bitorsor
    out = [f"bitorsor: {m}" for m in validate_bitorsor(cd.bitorsor)]
    out += [f"ψ: {m}" for m in validate_morphism(cd.psi)]
    if not is_central(cd.bitorsor, cd.alpha):
        out.append("α is not central")
    ahat = restricted_section_arrows(cd.twisted, cd.alpha)
    for h, g in phi.items():
        if cd.psi.arrows[ahat[h]] != g:
            out.append(f"ψ∘α̂ differs from φ at {h}")
    return out


# restriction

def restrict_extension(ext: Extension, T) -> Extension:
    T = [x for x in ext.objects if x in set(T)]
    if not T:
        raise GroupoidError("empty transversal")
    if len({ext.E.orbit_of[x] for x in T}) != len(orbits(ext.E)):
        raise GroupoidError("transversal does not meet every orbit")
    G = full_subgroupoid(ext.G, T)
    E = full_subgroupoid(ext.E, T)
    return Extension(ext.K.restrict(T), G, E, {x: ext.j[x] for x in T}, {g: ext.pi[g] for g in G.arrows})


def restrict_morphism_to(ext: Extension, phi: ExtensionMorphism, T) -> dict:
    Ts = set(T)
    return {g: phi.arrows[g] for g in ext.G.arrows if ext.G.src[g] in Ts and ext.G.tgt[g] in Ts}


# Baer sum, opposite, semidirect unit

def semidirect_unit(K: GroupBundle, E: FiniteGroupoid, mu: ActionData) -> Extension:
    """Arrows (k, e) with k in K_{tgt e}; (k,e)(k',f) = (k·(k'·e⁻¹), ef)."""
    def name(k, e):
        return f"{K[E.tgt[e]].label(k)}|{e}"
    arrows, compose = {}, {}
    for e in E.arrows:
        for k in range(K[E.tgt[e]].order):
            arrows[name(k, e)] = (E.src[e], E.tgt[e])
    for (e, f), ef in E.compose.items():
        y = E.tgt[e]
        einv = E.inv(e)
        for k in range(K[y].order):
            for k2 in range(K[E.tgt[f]].order):
                compose[(name(k, e), name(k2, f))] = name(K[y].mul(k, mu.table[einv][k2]), ef)
    units = {x: name(K[x].identity, E.units[x]) for x in E.objects}
    G = FiniteGroupoid(E.objects, arrows, compose, units)
    j = {x: tuple(name(k, E.units[x]) for k in range(K[x].order)) for x in E.objects}
    pi = {name(k, e): e for e in E.arrows for k in range(K[E.tgt[e]].order)}
    return Extension(K, G, E, j, pi)


def opposite_extension(ext: Extension) -> Extension:
    """G^op with j^op(k) = j(k)^op and π^op(g^op) = π(g)⁻¹."""
    if not ext.K.is_abelian:
        raise GroupoidError("the opposite extension needs abelian K")
    G, E = ext.G, ext.E

    def op(g):
        return f"op({g})"
    arrows = {op(g): (G.tgt[g], G.src[g]) for g in G.arrows}
    compose = {(op(g), op(h)): op(hg) for (h, g), hg in G.compose.items()}
    units = {x: op(u) for x, u in G.units.items()}
    Gop = FiniteGroupoid(G.objects, arrows, compose, units)
    j = {x: tuple(op(g) for g in ext.j[x]) for x in ext.j}
    pi = {op(g): E.inv(ext.pi[g]) for g in G.arrows}
    return Extension(ext.K, Gop, E, j, pi)


@dataclass
class BaerSum:
    extension: Extension
    first: Extension
    second: Extension
    pair_class: dict       # (g, h) -> least pair of its class
    names: dict            # least pair -> arrow name

    def pair_of(self, name: str) -> tuple:
        return self._by_name[name]

    @cached_property
    def _by_name(self) -> dict:
        return {v: k for k, v in self.names.items()}


def baer_sum(A: Extension, B: Extension) -> BaerSum:
    """Classes g⊗h (g in A, h in B over the same arrow) with g j(k)⊗h = g⊗h j(k); (g⊗h)(g'⊗h') = gg'⊗hh'."""
    if not (A.K.is_abelian and B.K.is_abelian):
        raise GroupoidError("Baer sum needs abelian K")
    if induced_action(A) != induced_action(B):
        raise GroupoidError("the two extensions induce different actions")
    E = A.E
    cls = {}
    for e in E.arrows:
        pairs = sorted((g, h) for g in A.fibers[e] for h in B.fibers[e])
        pos = {p: i for i, p in enumerate(pairs)}
        uf = _UnionFind(len(pairs))
        x = E.src[e]
        for g, h in pairs:
            for k in range(A.K[x].order):
                uf.union(pos[(A.G.mul(g, A.j[x][k]), h)], pos[(g, B.G.mul(h, B.j[x][k]))])
        for i, p in enumerate(pairs):
            cls[p] = pairs[uf.find(i)]
    reps = sorted(set(cls.values()))
    names = {p: f"{p[0]}⊗{p[1]}" for p in reps}
    arrows = {names[p]: (A.G.src[p[0]], A.G.tgt[p[0]]) for p in reps}
    into: dict = {}
    for p in reps:
        into.setdefault(A.G.tgt[p[0]], []).append(p)
    compose = {}
    for (g, h) in reps:
        for (g1, h1) in into.get(A.G.src[g], ()):
            compose[(names[(g, h)], names[(g1, h1)])] = names[cls[(A.G.mul(g, g1), B.G.mul(h, h1))]]
    units = {x: names[cls[(A.G.units[x], B.G.units[x])]] for x in E.objects}
    G = FiniteGroupoid(E.objects, arrows, compose, units)
    j = {x: tuple(names[cls[(A.j[x][k], B.G.units[x])]] for k in range(A.K[x].order)) for x in E.objects}
    pi = {names[p]: A.pi[p[0]] for p in reps}
    return BaerSum(Extension(A.K, G, E, j, pi), A, B, cls, names)


def baer_symmetry(AB: BaerSum, BA: BaerSum) -> ExtensionMorphism:
    """g⊗h ↦ h⊗g from A⊕B to B⊕A."""
    A, B = AB.first, AB.second
    f = {}
    for name in AB.extension.G.arrows:
        g, h = AB.pair_of(name)
        f[name] = BA.names[BA.pair_class[(h, g)]]
    K = AB.extension.K
    return ExtensionMorphism(AB.extension, BA.extension, f, {x: tuple(range(K[x].order)) for x in K.base})


# reconstruction from descent data

@dataclass
class DescentCocycle:
    cover: list            # list of tuples of objects
    gamma: list            # per i: {x: t}
    tau: dict              # (i, j) -> {x: arrow γ_j(x) -> γ_i(x)}


def validate_descent(GT: FiniteGroupoid, dc: DescentCocycle) -> list[str]:
    out = []
    n = len(dc.cover)
    for i in range(n):
        for x in dc.cover[i]:
            if dc.gamma[i][x] not in GT.objects:
                out.append(f"γ_{i}({x}) is not in T")
    for i in range(n):
        for j in range(n):
            Uij = set(dc.cover[i]) & set(dc.cover[j])
            for x in Uij:
                a = dc.tau[(i, j)][x]
                if GT.src[a] != dc.gamma[j][x] or GT.tgt[a] != dc.gamma[i][x]:
                    out.append(f"τ_{i}{j}({x}) has the wrong ends")
                if i == j and not GT.is_unit(a):
                    out.append(f"τ_{i}{i}({x}) is not a unit")
    if out:
        return out
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for x in set(dc.cover[i]) & set(dc.cover[j]) & set(dc.cover[k]):
                    if GT.mul(dc.tau[(i, j)][x], dc.tau[(j, k)][x]) != dc.tau[(i, k)][x]:
                        out.append(f"cocycle identity fails at ({i},{j},{k}) over {x}")
    return out


@dataclass
class Reconstruction:
    groupoid: FiniteGroupoid
    chart: dict            # x -> least i with x in U_i
    name: dict             # (x, h, y) -> arrow name
    triple: dict           # arrow name -> (x, h, y)
    comparison: dict       # arrow h of G_T -> arrow of the reconstruction (when T is fixed)


def reconstruct_from_cocycle(GT: FiniteGroupoid, dc: DescentCocycle, objects) -> Reconstruction:
    """Arrows x->y are classes of (i, h, j) with h: γ_i(x) -> γ_j(y); each class has one
    member with i, j the least charts of x and y."""
    rep = validate_descent(GT, dc)
    if rep:
        raise GroupoidError("invalid descent cocycle: " + "; ".join(rep[:3]))
    objects = list(objects)
    chart = {}
    for x in objects:
        idx = [i for i, U in enumerate(dc.cover) if x in U]
        if not idx:
            raise GroupoidError(f"{x} is not covered")
        chart[x] = idx[0]
    arrows, name, triple = {}, {}, {}
    for x in objects:
        gx = dc.gamma[chart[x]][x]
        for y in objects:
            gy = dc.gamma[chart[y]][y]
            for h in GT.hom(gx, gy):
                nm = f"[{x}|{h}|{y}]"
                arrows[nm] = (x, y)
                name[(x, h, y)] = nm
                triple[nm] = (x, h, y)
    compose = {}
    for n2, (y, h2, z) in triple.items():
        for n1, (x, h1, y1) in triple.items():
            if y1 == y:
                compose[(n2, n1)] = name[(x, GT.mul(h2, h1), z)]
    units = {x: name[(x, GT.units[dc.gamma[chart[x]][x]], x)] for x in objects}
    G = FiniteGroupoid(objects, arrows, compose, units)
    comparison = {}
    fixed = {t for t in GT.objects if t in chart and dc.gamma[chart[t]][t] == t}
    if fixed == set(GT.objects):
        for h in GT.arrows:
            comparison[h] = name[(GT.src[h], h, GT.tgt[h])]
    return Reconstruction(G, chart, name, triple, comparison)


def class_of_triple(rec: Reconstruction, dc: DescentCocycle, GT: FiniteGroupoid, i, h, j, x, y) -> str:
    """Name of the class of (i, h, j) for h: γ_i(x) -> γ_j(y)."""
    i0, j0 = rec.chart[x], rec.chart[y]
    return rec.name[(x, GT.chain(dc.tau[(j0, j)][y], h, dc.tau[(i, i0)][x]), y)]
