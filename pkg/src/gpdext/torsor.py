"""Torsors and bitorsors over a finite discrete base.

A fiber is a list of point names; actions are index tables:
``right[x][i][k]`` is the index of p_i·k and ``left[x][l][i]`` the index of l·p_i.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import GroupoidError
from .groupoid import GroupBundle
from .groups import FiniteGroup


@dataclass
class Bitorsor:
    points: dict                      # x -> tuple of point names
    right_bundle: GroupBundle | None = None
    left_bundle: GroupBundle | None = None
    right: dict = field(default_factory=dict)
    left: dict = field(default_factory=dict)

    @property
    def base(self) -> tuple:
        return tuple(self.points)

    def index(self, x, name: str) -> int:
        return self.points[x].index(name)

    def fiber_of(self, name: str):
        for x, pts in self.points.items():
            if name in pts:
                return x
        raise KeyError(name)

    def act_right(self, x, i: int, k: int) -> int:
        return self.right[x][i][k]

    def act_left(self, x, l: int, i: int) -> int:
        return self.left[x][l][i]


Torsor = Bitorsor  # a right torsor is a bitorsor without left data


def _free_transitive(table, n_points, group: FiniteGroup, side: str) -> str | None:
    for i in range(n_points):
        if side == "right":
            orbit = {table[i][k] for k in range(group.order)}
        else:
            orbit = {table[k][i] for k in range(group.order)}
        if len(orbit) != n_points or n_points != group.order:
            return "not free and transitive"
    return None


def validate_bitorsor(P: Bitorsor) -> list[str]:
    out = []
    for x, pts in P.points.items():
        n = len(pts)
        if n == 0:
            out.append(f"empty fiber at {x}")
            continue
        if P.right_bundle is not None:
            K = P.right_bundle[x]
            R = P.right[x]
            for i in range(n):
                if R[i][K.identity] != i:
                    out.append(f"right unit fails at {x}")
                for a in range(K.order):
                    for b in range(K.order):
                        if R[R[i][a]][b] != R[i][K.mul(a, b)]:
                            out.append(f"right action not associative at {x}")
                            break
            msg = _free_transitive(R, n, K, "right")
            if msg:
                out.append(f"right action {msg} at {x}")
        if P.left_bundle is not None:
            L = P.left_bundle[x]
            Lt = P.left[x]
            for i in range(n):
                if Lt[L.identity][i] != i:
                    out.append(f"left unit fails at {x}")
                for a in range(L.order):
                    for b in range(L.order):
                        if Lt[a][Lt[b][i]] != Lt[L.mul(a, b)][i]:
                            out.append(f"left action not associative at {x}")
                            break
            msg = _free_transitive(Lt, n, L, "left")
            if msg:
                out.append(f"left action {msg} at {x}")
        if P.left_bundle is not None and P.right_bundle is not None:
            K, L = P.right_bundle[x], P.left_bundle[x]
            if any(P.left[x][l][P.right[x][i][k]] != P.right[x][P.left[x][l][i]][k]
                   for l in range(L.order) for k in range(K.order) for i in range(n)):
                out.append(f"actions do not commute at {x}")
    return out


def trivial_torsor(K: GroupBundle, left: bool = True) -> Bitorsor:
    """K acting on itself; with ``left`` also the left multiplication."""
    pts, R, Lt = {}, {}, {}
    for x in K.base:
        G = K[x]
        pts[x] = tuple(f"{x}:{G.label(k)}" for k in range(G.order))
        R[x] = [[G.mul(i, k) for k in range(G.order)] for i in range(G.order)]
        Lt[x] = [[G.mul(l, i) for i in range(G.order)] for l in range(G.order)]
    return Bitorsor(pts, K, K if left else None, R, Lt if left else {})


def with_automorphism(K: GroupBundle, sigma: dict) -> Bitorsor:
    """The bitorsor (K, σ): trivial right torsor with l·p = σ(l)p, so l·1 = 1·σ(l)."""
    P = trivial_torsor(K, left=False)
    Lt = {}
    for x in K.base:
        G, s = K[x], sigma[x]
        Lt[x] = [[G.mul(s[l], i) for i in range(G.order)] for l in range(G.order)]
    P.left_bundle, P.left = K, Lt
    return P


def division(P: Bitorsor, q: str, p: str) -> int:
    """The unique k with q·k = p."""
    x = P.fiber_of(q)
    if p not in P.points[x]:
        raise GroupoidError(f"{q} and {p} lie in different fibers")
    iq, ip = P.index(x, q), P.index(x, p)
    for k, j in enumerate(P.right[x][iq]):
        if j == ip:
            return k
    raise GroupoidError("right action is not transitive")


def _division_idx(P: Bitorsor, x, iq: int, ip: int) -> int:
    row = P.right[x][iq]
    return row.index(ip)


def _left_division_idx(P: Bitorsor, x, iq: int, ip: int) -> int:
    """The unique l with l·q = p."""
    Lt = P.left[x]
    for l in range(len(Lt)):
        if Lt[l][iq] == ip:
            return l
    raise GroupoidError("left action is not transitive")


def inverse_name(name: str) -> str:
    return name[:-2] if name.endswith("⁻¹") else name + "⁻¹"


def invert_torsor(P: Bitorsor) -> Bitorsor:
    """P⁻¹ with k·p⁻¹ = (p·k⁻¹)⁻¹ and, for a bitorsor, p⁻¹·l = (l⁻¹·p)⁻¹."""
    pts, R, Lt = {}, {}, {}
    for x, names in P.points.items():
        pts[x] = tuple(inverse_name(p) for p in names)
        n = len(names)
        if P.right_bundle is not None:
            K = P.right_bundle[x]
            Lt[x] = [[P.right[x][i][K.inv(k)] for i in range(n)] for k in range(K.order)]
        if P.left_bundle is not None:
            L = P.left_bundle[x]
            R[x] = [[P.left[x][L.inv(l)][i] for l in range(L.order)] for i in range(n)]
    return Bitorsor(pts, P.left_bundle, P.right_bundle, R, Lt)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if a < b:
                self.parent[b] = a
            else:
                self.parent[a] = b


@dataclass
class TensorQuotient:
    """Classes of P_x × Q_x; ``cls[x][(i, j)]`` is the class index, ``rep[x][c]`` its least pair."""
    cls: dict
    rep: dict


def tensor_with_quotient(P: Bitorsor, Q: Bitorsor) -> tuple[Bitorsor, TensorQuotient]:
    if P.right_bundle is None or Q.left_bundle is None:
        raise GroupoidError("tensor needs a right torsor on the left and a left torsor on the right")
    pts, R, Lt, cls, rep = {}, {}, {}, {}, {}
    for x in P.base:
        K = P.right_bundle[x]
        if Q.left_bundle[x] != K:
            raise GroupoidError(f"structure groups differ at {x}")
        nP, nQ = len(P.points[x]), len(Q.points[x])
        uf = _UnionFind(nP * nQ)
        for i in range(nP):
            for j in range(nQ):
                for k in range(K.order):
                    # (p·k, q) ~ (p, k·q)
                    uf.union(P.right[x][i][k] * nQ + j, i * nQ + Q.left[x][k][j])
        roots = sorted({uf.find(a) for a in range(nP * nQ)})
        index = {r: c for c, r in enumerate(roots)}
        cx = {(i, j): index[uf.find(i * nQ + j)] for i in range(nP) for j in range(nQ)}
        reps = [divmod(r, nQ) for r in roots]  # roots are the least members
        cls[x], rep[x] = cx, reps
        pts[x] = tuple(f"{P.points[x][i]}⊗{Q.points[x][j]}" for i, j in reps)
        if Q.right_bundle is not None:
            H = Q.right_bundle[x]
            R[x] = [[cx[(i, Q.right[x][j][h])] for h in range(H.order)] for i, j in reps]
        if P.left_bundle is not None:
            L = P.left_bundle[x]
            Lt[x] = [[cx[(P.left[x][l][i], j)] for i, j in reps] for l in range(L.order)]
    out = Bitorsor(pts, Q.right_bundle, P.left_bundle, R, Lt)
    return out, TensorQuotient(cls, rep)


def tensor(P: Bitorsor, Q: Bitorsor) -> Bitorsor:
    """P ⊗_K Q, identifying (p·k, q) with (p, k·q)."""
    return tensor_with_quotient(P, Q)[0]


def adjoint_bundle(P: Bitorsor) -> tuple[GroupBundle, TensorQuotient]:
    """P ⊗ P⁻¹ with (p⊗q⁻¹)(r⊗s⁻¹) = p(q⁻¹r)⊗s⁻¹."""
    Pr = Bitorsor(P.points, P.right_bundle, None, P.right, {})
    inv = invert_torsor(Pr)
    T, quo = tensor_with_quotient(Pr, inv)
    fibers = {}
    for x in P.base:
        n = len(T.points[x])
        reps = quo.rep[x]
        table = []
        for (p, q) in reps:
            row = []
            for (r, s) in reps:
                k = _division_idx(P, x, q, r)
                row.append(quo.cls[x][(P.right[x][p][k], s)])
            table.append(row)
        fibers[x] = FiniteGroup(table, T.points[x], name=f"Ad({x})")
    return GroupBundle(fibers), quo


def adjoint_to_structure(P: Bitorsor, quo: TensorQuotient) -> dict:
    """For abelian K: the class of p⊗q⁻¹ goes to the k with q·k = p."""
    out = {}
    for x in P.base:
        out[x] = tuple(_division_idx(P, x, q, p) for p, q in quo.rep[x])
    return out


def conjugation_by_section(P: Bitorsor, alpha: dict) -> dict:
    """ᾱ on each fiber of the section's domain: ᾱ(k) is the l with α(x)·k = l·α(x).

    ``alpha`` maps x to a point name.
    """
    out = {}
    for x, name in alpha.items():
        i = P.index(x, name)
        K = P.right_bundle[x]
        out[x] = tuple(_left_division_idx(P, x, i, P.right[x][i][k]) for k in range(K.order))
    return out


def is_central(P: Bitorsor, alpha: dict) -> bool:
    return all(m == tuple(range(len(m))) for m in conjugation_by_section(P, alpha).values())


def sections(P: Bitorsor, domain=None):
    """Every section over ``domain`` (default: the whole base)."""
    dom = list(P.base if domain is None else domain)
    for vals in itertools.product(*(P.points[x] for x in dom)):
        yield dict(zip(dom, vals))


def bitorsor_isomorphism(P: Bitorsor, Q: Bitorsor) -> dict | None:
    """A fiberwise bijection commuting with both actions, as {point: point}, or None."""
    if set(P.base) != set(Q.base):
        return None
    out = {}
    for x in P.base:
        nP, nQ = len(P.points[x]), len(Q.points[x])
        if nP != nQ:
            return None
        K = P.right_bundle[x]
        found = None
        for q0 in range(nQ):
            # equivariance for the free right action pins f down from f(p_0)
            f = [None] * nP
            ok = True
            for k in range(K.order):
                i, j = P.right[x][0][k], Q.right[x][q0][k]
                if f[i] is not None and f[i] != j:
                    ok = False
                    break
                f[i] = j
            if not ok or None in f:
                continue
            if P.left_bundle is not None:
                L = P.left_bundle[x]
                if Q.left_bundle is None or any(f[P.left[x][l][i]] != Q.left[x][l][f[i]]
                                                for l in range(L.order) for i in range(nP)):
                    continue
            found = f
            break
        if found is None:
            return None
        for i, j in enumerate(found):
            out[P.points[x][i]] = Q.points[x][j]
    return out


def left_automorphism(P: Bitorsor, x, point: int = 0) -> tuple[int, ...]:
    """σ with l·p = p·σ(l) for the given base point p (a K-K bitorsor)."""
    L = P.left_bundle[x]
    return tuple(_division_idx(P, x, point, P.left[x][l][point]) for l in range(L.order))


def pushforward(P: Bitorsor, tau: dict) -> Bitorsor:
    """τ!P: same points with p*k = p·τ⁻¹(k)."""
    R = {}
    for x in P.base:
        K = P.right_bundle[x]
        tinv = [0] * K.order
        for a, b in enumerate(tau[x]):
            tinv[b] = a
        R[x] = [[P.right[x][i][tinv[k]] for k in range(K.order)] for i in range(len(P.points[x]))]
    return Bitorsor(P.points, P.right_bundle, None, R, {})


def right_tensor(P: Bitorsor, Q: Bitorsor) -> Bitorsor:
    """P ⊗ Q for right torsors of an abelian bundle, reading Q's action on the left."""
    if not P.right_bundle.is_abelian:
        raise GroupoidError("right tensor needs abelian fibers")
    Ql = Bitorsor(Q.points, Q.right_bundle, Q.right_bundle, Q.right,
                  {x: [[Q.right[x][i][k] for i in range(len(Q.points[x]))] for k in range(Q.right_bundle[x].order)]
                   for x in Q.base})
    T = tensor(Bitorsor(P.points, P.right_bundle, None, P.right, {}), Ql)
    T.left_bundle, T.left = None, {}
    return T


def abelian_product(P: Bitorsor, sigma: dict, Q: Bitorsor, tau: dict) -> Bitorsor:
    """(τ!P ⊗^(r) Q) with left action through τσ."""
    T = right_tensor(pushforward(P, tau), Q)
    comp = {x: tuple(tau[x][sigma[x][k]] for k in range(len(sigma[x]))) for x in P.base}
    Lt = {}
    for x in T.base:
        K = T.right_bundle[x]
        Lt[x] = [[T.right[x][i][comp[x][l]] for i in range(len(T.points[x]))] for l in range(K.order)]
    T.left_bundle, T.left = T.right_bundle, Lt
    return T


@dataclass
class BitorsorClassGroup:
    """Isomorphism classes of K-K bitorsors under tensor product."""
    representatives: list
    automorphisms: list          # per class: {x: σ_x}
    table: list                  # table[a][b] = class of rep_a ⊗ rep_b
    identity: int

    @property
    def order(self) -> int:
        return len(self.representatives)

    def as_group(self) -> FiniteGroup:
        return FiniteGroup(self.table, [str(i) for i in range(self.order)], name="Bitor")


def _left_actions(K: FiniteGroup) -> list[tuple[int, ...]]:
    """Left actions on the trivial right K-torsor commuting with it, by table check.

    Candidates are determined by where l sends the point 1; each is kept only when
    the resulting table is a free transitive left action commuting with the right one.
    """
    n = K.order
    out = []
    for s in itertools.product(range(n), repeat=n):
        table = [[K.mul(s[l], i) for i in range(n)] for l in range(n)]
        if any(table[K.identity][i] != i for i in range(n)):
            continue
        if any(table[a][table[b][i]] != table[K.mul(a, b)][i] for a in range(n) for b in range(n) for i in range(n)):
            continue
        if any(len({table[l][i] for l in range(n)}) != n for i in range(n)):
            continue
        if any(table[l][K.mul(i, k)] != K.mul(table[l][i], k) for l in range(n) for i in range(n) for k in range(n)):
            continue
        out.append(s)
    return out


def classify_bitorsors(base, K: GroupBundle) -> BitorsorClassGroup:
    base = list(base)
    if not K.is_abelian:
        raise GroupoidError("classification of bitorsors is implemented for abelian fibers")
    per_fiber = {}
    for x in base:
        G = K[x]
        reps, seen = [], []
        for s in _left_actions(G):
            P = Bitorsor({x: tuple(f"{x}:{G.label(k)}" for k in range(G.order))}, GroupBundle({x: G}),
                         GroupBundle({x: G}), {x: [[G.mul(i, k) for k in range(G.order)] for i in range(G.order)]},
                         {x: [[G.mul(s[l], i) for i in range(G.order)] for l in range(G.order)]})
            if any(bitorsor_isomorphism(P, Q) is not None for Q in seen):
                continue
            seen.append(P)
            reps.append(s)
        per_fiber[x] = reps
    combos = list(itertools.product(*(range(len(per_fiber[x])) for x in base)))
    reps, autos = [], []
    for c in combos:
        left = {x: per_fiber[x][i] for x, i in zip(base, c)}
        Lt = {x: [[K[x].mul(left[x][l], i) for i in range(K[x].order)] for l in range(K[x].order)] for x in base}
        T = trivial_torsor(K, left=False)
        T.left_bundle, T.left = K, Lt
        reps.append(T)
        autos.append({x: left_automorphism(T, x) for x in base})
    table = []
    for P in reps:
        row = []
        for Q in reps:
            PQ = tensor(P, Q)
            row.append(next(i for i, R in enumerate(reps) if bitorsor_isomorphism(PQ, R) is not None))
        table.append(row)
    ident = next(i for i, a in enumerate(autos) if all(a[x] == tuple(range(K[x].order)) for x in base))
    return BitorsorClassGroup(reps, autos, table, ident)


def expected_class_count(base, K: GroupBundle) -> int:
    return math.prod(len(K[x].automorphisms) for x in base)
