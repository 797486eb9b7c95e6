"""Expanding an extension over a transversal T to one over all of M.

The coefficients over M are pulled back from T: K_x := K_{γ(x)} where γ(x) is the
transversal point of the first chart containing x.  An element of K_{γ_i(x)} is moved
to K_x by the B-action of τ_i(x)τ_{i0}(x)⁻¹, which is the discrete form of ``·τ_i(x)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cohomology import CohomologyGroup, FiniteCochainComplex, complex_cohomology
from .errors import GroupoidError, GuardExceeded
from .extension import (DescentCocycle, Extension, extensions_isomorphic, reconstruct_from_cocycle,
                        restrict_extension, validate_extension)
from .groupoid import FiniteGroupoid, GroupBundle, full_subgroupoid, is_complete_transversal, orbits
from .groups import coordinates


@dataclass
class CoverData:
    E: FiniteGroupoid
    T: tuple
    cover: list            # list of tuples of points
    gamma: list            # per chart: {x: t}
    tau: list              # per chart: {x: arrow x -> γ_i(x)}

    @property
    def size(self) -> int:
        return len(self.cover)

    def charts_of(self, x) -> list[int]:
        return [i for i, U in enumerate(self.cover) if x in U]

    def chart(self, x) -> int:
        return self.charts_of(x)[0]

    def overlap(self, *idx) -> list:
        pts = set(self.cover[idx[0]])
        for i in idx[1:]:
            pts &= set(self.cover[i])
        return sorted(pts)

    def tau_ij(self, i: int, j: int, x) -> str:
        """τ_i(x)τ_j(x)⁻¹ : γ_j(x) -> γ_i(x)."""
        return self.E.mul(self.tau[i][x], self.E.inv(self.tau[j][x]))


def build_cover_data(E: FiniteGroupoid, T, cover, choices: dict | None = None) -> CoverData:
    """``choices[(i, x)]`` optionally fixes τ_i(x); otherwise points of T use their unit
    and other points the least-named arrow into T."""
    T = tuple(sorted(T))
    cover = [tuple(sorted(U)) for U in cover]
    if any(t not in E.objects for t in T):
        raise GroupoidError("T must be a set of objects")
    if not is_complete_transversal(E, T):
        raise GroupoidError("T does not meet every orbit")
    covered = set().union(*map(set, cover)) if cover else set()
    missing = set(E.objects) - covered
    if missing:
        raise GroupoidError(f"the cover misses {sorted(missing)}")
    choices = choices or {}
    gamma, tau = [], []
    for i, U in enumerate(cover):
        g, t = {}, {}
        for x in U:
            if (i, x) in choices:
                a = choices[(i, x)]
                if E.src[a] != x or E.tgt[a] not in T:
                    raise GroupoidError(f"τ_{i}({x}) = {a} is not an arrow from {x} into T")
            elif x in T:
                a = E.units[x]
            else:
                into = sorted(a for a in E.out_of(x) if E.tgt[a] in T)
                if not into:
                    raise GroupoidError(f"no arrow from {x} into T")
                a = into[0]
            if x in T and a != E.units[x]:
                raise GroupoidError(f"points of T must use their unit (τ_{i}({x}) = {a})")
            t[x] = a
            g[x] = E.tgt[a]
        gamma.append(g)
        tau.append(t)
    return CoverData(E, T, cover, gamma, tau)


def cover_problems(cd: CoverData) -> list[str]:
    out = []
    E = cd.E
    for i in range(cd.size):
        for j in range(cd.size):
            for k in range(cd.size):
                for x in cd.overlap(i, j, k):
                    if E.mul(cd.tau_ij(i, j, x), cd.tau_ij(j, k, x)) != cd.tau_ij(i, k, x):
                        out.append(f"τ_{i}{j}τ_{j}{k} ≠ τ_{i}{k} at {x}")
        for x in cd.cover[i]:
            if not E.is_unit(cd.tau_ij(i, i, x)):
                out.append(f"τ_{i}{i}({x}) is not a unit")
    return out


def _check_base(B: Extension, cd: CoverData) -> None:
    ET = full_subgroupoid(cd.E, cd.T)
    if set(B.E.arrows) != set(ET.arrows) or B.E.compose != ET.compose:
        raise GroupoidError("B must be an extension of the full subgroupoid of E on T")


# lifting families

@dataclass
class LiftingFamily:
    beta: dict             # (i, j) -> {x: B-arrow γ_j(x) -> γ_i(x)}


def choose_liftings(B: Extension, cd: CoverData) -> LiftingFamily:
    """Least-named lift for i < j, the inverse for i > j, units on the diagonal."""
    _check_base(B, cd)
    G = B.G
    beta = {}
    for i in range(cd.size):
        for j in range(cd.size):
            pts = cd.overlap(i, j)
            if i == j:
                beta[(i, j)] = {x: G.units[cd.gamma[i][x]] for x in pts}
            elif i < j:
                beta[(i, j)] = {x: B.lift(cd.tau_ij(i, j, x)) for x in pts}
    for i in range(cd.size):
        for j in range(i):
            beta[(i, j)] = {x: G.inv(a) for x, a in beta[(j, i)].items()}
    return LiftingFamily(beta)


def lifting_problems(B: Extension, cd: CoverData, lf: LiftingFamily, cocycle: bool = False) -> list[str]:
    out = []
    G = B.G
    for i in range(cd.size):
        for j in range(cd.size):
            for x in cd.overlap(i, j):
                b = lf.beta[(i, j)][x]
                if B.pi[b] != cd.tau_ij(i, j, x):
                    out.append(f"β_{i}{j}({x}) does not lie over τ_{i}{j}({x})")
                if i == j and not G.is_unit(b):
                    out.append(f"β_{i}{i}({x}) is not a unit")
    if cocycle and not out:
        for i, j, k in itertools.product(range(cd.size), repeat=3):
            for x in cd.overlap(i, j, k):
                if G.mul(lf.beta[(i, j)][x], lf.beta[(j, k)][x]) != lf.beta[(i, k)][x]:
                    out.append(f"β_{i}{j}β_{j}{k} ≠ β_{i}{k} at {x}")
    return out


# transport between K_{γ_i(x)} and K_x

def pulled_back_bundle(B: Extension, cd: CoverData) -> GroupBundle:
    return GroupBundle({x: B.K[cd.gamma[cd.chart(x)][x]] for x in cd.E.objects})


def to_point(B: Extension, cd: CoverData, i: int, x, k: int) -> int:
    """k in K_{γ_i(x)} acted on by τ_i(x)τ_{i0}(x)⁻¹, landing in K_x = K_{γ_{i0}(x)}."""
    i0 = cd.chart(x)
    a = B.lift(cd.tau_ij(i, i0, x))
    G = B.G
    return B.kernel_index[G.chain(G.inv(a), B.j[cd.gamma[i][x]][k], a)]


def from_point(B: Extension, cd: CoverData, j: int, x, k: int) -> int:
    """The inverse transport K_x -> K_{γ_j(x)}."""
    i0 = cd.chart(x)
    a = B.lift(cd.tau_ij(i0, j, x))
    G = B.G
    return B.kernel_index[G.chain(G.inv(a), B.j[cd.gamma[i0][x]][k], a)]


# Čech complexes

class CechComplexBuilder:
    """Ordered Čech cochains of a cover.

    ``pointwise``: one K_x summand per (tuple, x ∈ U_tuple), the sections complex.
    Otherwise one copy of the constant group per tuple with nonempty overlap (the nerve).
    """

    def __init__(self, cover, value_moduli, pointwise: bool = True):
        self.cover = [set(U) for U in cover]
        self.value_moduli = value_moduli      # x -> moduli (pointwise) or a single tuple
        self.pointwise = pointwise
        self._index: dict = {}

    def _overlap(self, idx):
        pts = set(self.cover[idx[0]])
        for i in idx[1:]:
            pts &= self.cover[i]
        return pts

    def index(self, n: int):
        if n not in self._index:
            entries, offs, mods = [], {}, []
            if n >= 0:
                for idx in itertools.product(range(len(self.cover)), repeat=n + 1):
                    pts = self._overlap(idx)
                    if not pts:
                        continue
                    keys = [(idx, x) for x in sorted(pts)] if self.pointwise else [(idx, None)]
                    for key in keys:
                        offs[key] = len(mods)
                        m = self.value_moduli[key[1]] if self.pointwise else self.value_moduli
                        mods.extend(m)
                        entries.append(key)
            self._index[n] = (entries, offs, mods)
        return self._index[n]

    def moduli(self, n: int):
        return self.index(n)[2]

    def differential(self, n: int) -> np.ndarray:
        src_entries, src_offs, src_mods = self.index(n)
        dst_entries, dst_offs, dst_mods = self.index(n + 1)
        D = np.zeros((len(dst_mods), len(src_mods)), dtype=np.int64)
        for (idx, x) in dst_entries:
            row = dst_offs[(idx, x)]
            width = len(self.value_moduli[x] if self.pointwise else self.value_moduli)
            for k in range(len(idx)):
                face = idx[:k] + idx[k + 1:]
                col = src_offs[(face, x)]
                sign = -1 if k % 2 else 1
                for c in range(width):
                    D[row + c, col + c] += sign
        mods = np.array(dst_mods, dtype=np.int64)
        return D % mods[:, None] if len(mods) else D


def cech_complex(B: Extension, cd: CoverData) -> tuple[FiniteCochainComplex, CechComplexBuilder]:
    K = pulled_back_bundle(B, cd)
    if not K.is_abelian:
        raise GroupoidError("the Čech obstruction needs abelian K; use lifting_exists_bruteforce")
    mods = {x: coordinates(K[x]).moduli for x in cd.E.objects}
    b = CechComplexBuilder(cd.cover, mods, pointwise=True)
    return FiniteCochainComplex(builder=b), b


def nerve_complex(cover, moduli) -> FiniteCochainComplex:
    """Constant coefficients (Z/m1 ⊕ ...) on ordered tuples with nonempty overlap."""
    return FiniteCochainComplex(builder=CechComplexBuilder(cover, tuple(moduli), pointwise=False))


# the obstruction

def obstruction_cocycle(B: Extension, cd: CoverData, lf: LiftingFamily) -> dict:
    """ν_ijk(x) = (β_ij β_jk β_ik⁻¹)(x) moved into K_x, on every ordered triple."""
    if not B.K.is_abelian:
        raise GroupoidError("non-abelian K: use lifting_exists_bruteforce")
    G = B.G
    nu = {}
    for i, j, k in itertools.product(range(cd.size), repeat=3):
        pts = cd.overlap(i, j, k)
        if not pts:
            continue
        row = {}
        for x in pts:
            loop = G.chain(lf.beta[(i, j)][x], lf.beta[(j, k)][x], G.inv(lf.beta[(i, k)][x]))
            row[x] = to_point(B, cd, i, x, B.kernel_index[loop])
        nu[(i, j, k)] = row
    return nu


def _to_vector(builder: CechComplexBuilder, K: GroupBundle, n: int, cochain: dict) -> np.ndarray:
    entries, offs, mods = builder.index(n)
    v = np.zeros(len(mods), dtype=np.int64)
    for (idx, x) in entries:
        val = cochain.get(idx, {}).get(x, K[x].identity)
        for c, a in enumerate(coordinates(K[x]).to_vec(val)):
            v[offs[(idx, x)] + c] = a
    return v


def _from_vector(builder: CechComplexBuilder, K: GroupBundle, n: int, v) -> dict:
    entries, offs, mods = builder.index(n)
    out: dict = {}
    for (idx, x) in entries:
        co = coordinates(K[x])
        o = offs[(idx, x)]
        out.setdefault(idx, {})[x] = co.from_vec([int(a) for a in v[o:o + len(co.moduli)]])
    return out


def cech_coboundary(cd: CoverData, K: GroupBundle, c: dict, n: int) -> dict:
    """Alternating face sum, evaluated directly (used to cross-check the matrix)."""
    out = {}
    for idx in itertools.product(range(cd.size), repeat=n + 2):
        pts = cd.overlap(*idx)
        if not pts:
            continue
        row = {}
        for x in pts:
            F = K[x]
            acc = F.identity
            for k in range(len(idx)):
                v = c[idx[:k] + idx[k + 1:]][x]
                acc = F.mul(acc, v if k % 2 == 0 else F.inv(v))
            row[x] = acc
        out[idx] = row
    return out


@dataclass
class ObstructionClass:
    group: CohomologyGroup
    coords: tuple
    witness: dict | None          # 1-cochain μ with dμ = ν when the class vanishes

    @property
    def vanishes(self) -> bool:
        return all(c == 0 for c in self.coords)


def obstruction_class(B: Extension, cd: CoverData, nu: dict) -> ObstructionClass:
    cx, builder = cech_complex(B, cd)
    K = pulled_back_bundle(B, cd)
    H = complex_cohomology(cx, 2)
    v = _to_vector(builder, K, 2, nu)
    coords = H.class_of(v)
    witness = None
    if all(c == 0 for c in coords):
        w = H.coboundary_witness(v)
        witness = _from_vector(builder, K, 1, w)
    return ObstructionClass(H, coords, witness)


def correct_liftings(B: Extension, cd: CoverData, lf: LiftingFamily, mu: dict) -> LiftingFamily:
    """β̂_ij(x) = β_ij(x)·(μ_ij(x)⁻¹ moved to K_{γ_j(x)})."""
    G = B.G
    K = pulled_back_bundle(B, cd)
    out = {}
    for (i, j), row in lf.beta.items():
        new = {}
        for x, b in row.items():
            m = K[x].inv(mu[(i, j)][x])
            new[x] = G.mul(b, B.j[cd.gamma[j][x]][from_point(B, cd, j, x, m)])
        out[(i, j)] = new
    fixed = LiftingFamily(out)
    bad = lifting_problems(B, cd, fixed, cocycle=True)
    if bad:
        raise GroupoidError("μ is not a valid witness: " + bad[0])
    return fixed


def lifting_difference(B: Extension, cd: CoverData, alpha: LiftingFamily, beta: LiftingFamily) -> dict:
    """ψ̃_ij(x): β_ij = ψ_ij α_ij with ψ_ij in K_{γ_i(x)}, moved into K_x."""
    G = B.G
    out = {}
    for (i, j), row in beta.beta.items():
        out[(i, j)] = {x: to_point(B, cd, i, x, B.kernel_index[G.mul(b, G.inv(alpha.beta[(i, j)][x]))])
                       for x, b in row.items()}
    return out


# expansion

@dataclass
class Expansion:
    extension: Extension
    comparison: dict       # B-arrow -> arrow of the expansion, over T


def expand_extension(B: Extension, cd: CoverData, lf: LiftingFamily) -> Expansion:
    """Glue B along the cocycle β̂ into an extension over M."""
    _check_base(B, cd)
    bad = lifting_problems(B, cd, lf, cocycle=True)
    if bad:
        raise GroupoidError("lifting family is not a cocycle: " + bad[0])
    dc = DescentCocycle(list(cd.cover), list(cd.gamma), dict(lf.beta))
    rec = reconstruct_from_cocycle(B.G, dc, cd.E.objects)
    E = cd.E
    K = pulled_back_bundle(B, cd)
    pi, j = {}, {}
    for nm, (x, h, y) in rec.triple.items():
        tx, ty = cd.tau[rec.chart[x]][x], cd.tau[rec.chart[y]][y]
        pi[nm] = E.chain(E.inv(ty), B.pi[h], tx)
    for x in E.objects:
        t = cd.gamma[rec.chart[x]][x]
        j[x] = tuple(rec.name[(x, B.j[t][k], x)] for k in range(K[x].order))
    ext = Extension(K, rec.groupoid, E, j, pi)
    return Expansion(ext, rec.comparison)


def restricts_to(exp: Expansion, B: Extension, T) -> bool:
    return extensions_isomorphic(restrict_extension(exp.extension, T), B) is not None


# brute force

@dataclass
class BruteForceResult:
    exists: bool
    witness: LiftingFamily | None
    searched: int = 0


def lifting_search_size(B: Extension, cd: CoverData) -> int:
    size = 1
    for i in range(cd.size):
        for j in range(i + 1, cd.size):
            for x in cd.overlap(i, j):
                size *= len(B.fibers[cd.tau_ij(i, j, x)])
    return size


def lifting_exists_bruteforce(B: Extension, cd: CoverData, guard: int = 10 ** 8) -> BruteForceResult:
    """Exhaustive search for β with β_ij β_jk = β_ik (β_ji = β_ij⁻¹, β_ii = 1).

    The condition is pointwise, so the search runs independently at each point.
    """
    _check_base(B, cd)
    size = lifting_search_size(B, cd)
    if size > guard:
        raise GuardExceeded(size, guard, "lifting search space")
    G = B.G
    beta = {(i, j): {} for i in range(cd.size) for j in range(cd.size)}
    searched = 0
    for x in cd.E.objects:
        charts = cd.charts_of(x)
        pairs = [(i, j) for i in charts for j in charts if i < j]
        choices = [B.fibers[cd.tau_ij(i, j, x)] for i, j in pairs]
        found = None
        for combo in itertools.product(*choices):
            searched += 1
            b = dict(zip(pairs, combo))
            for i in charts:
                b[(i, i)] = G.units[cd.gamma[i][x]]
            for (i, j), a in list(b.items()):
                if i < j:
                    b[(j, i)] = G.inv(a)
            if all(G.mul(b[(i, j)], b[(j, k)]) == b[(i, k)] for i in charts for j in charts for k in charts):
                found = b
                break
        if found is None:
            return BruteForceResult(False, None, searched)
        for key, a in found.items():
            beta[key][x] = a
    return BruteForceResult(True, LiftingFamily(beta), searched)


def liftings_from_extension(ext: Extension, cd: CoverData) -> tuple[LiftingFamily, dict]:
    """β_ij = b_i b_j⁻¹ for least lifts b_i of τ_i in an extension over M, plus the bundle
    map K_x (pulled back) -> ext.K_x given by conjugation with b_{i0}(x)."""
    G = ext.G
    b = {(i, x): ext.lift(cd.tau[i][x]) for i in range(cd.size) for x in cd.cover[i]}
    for i in range(cd.size):
        for x in cd.cover[i]:
            if x in cd.T:
                b[(i, x)] = G.units[x]
    beta = {}
    for i in range(cd.size):
        for j in range(cd.size):
            beta[(i, j)] = {x: G.mul(b[(i, x)], G.inv(b[(j, x)])) for x in cd.overlap(i, j)}
    bundle = {}
    for x in cd.E.objects:
        i0 = cd.chart(x)
        t = cd.gamma[i0][x]
        g = b[(i0, x)]
        bundle[x] = tuple(ext.kernel_index[G.chain(G.inv(g), ext.j[t][k], g)] for k in range(ext.K[t].order))
    return LiftingFamily(beta), bundle


@dataclass
class ObstructionReport:
    class_vanishes: bool | None
    brute_force: bool | None        # None when the search is past the guard
    expanded: bool
    restricts: bool
    expansion: Expansion | None = None
    obstruction: ObstructionClass | None = None
    notes: list = field(default_factory=list)


def obstruct(B: Extension, cd: CoverData, guard: int = 10 ** 8) -> ObstructionReport:
    """All three routes: the Čech class (abelian K), the lifting search, and the expansion."""
    cls = None
    expansion = None
    notes = []
    lf = choose_liftings(B, cd)
    if B.K.is_abelian:
        nu = obstruction_cocycle(B, cd, lf)
        cls = obstruction_class(B, cd, nu)
        if cls.vanishes:
            expansion = expand_extension(B, cd, correct_liftings(B, cd, lf, cls.witness))
    if lifting_search_size(B, cd) > guard and cls is not None:
        brute = None
        notes.append("lifting search past the guard; only the Čech class was computed")
    else:
        brute = lifting_exists_bruteforce(B, cd, guard)
        if expansion is None and brute.exists:
            expansion = expand_extension(B, cd, brute.witness)
            notes.append("expansion built from the brute-force lifting")
    ok = expansion is not None and not validate_extension(expansion.extension)
    restricts = ok and restricts_to(expansion, B, cd.T)
    return ObstructionReport(None if cls is None else cls.vanishes, None if brute is None else brute.exists,
                             ok, restricts,
                             expansion, cls, notes)
