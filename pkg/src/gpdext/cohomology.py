"""Cochain complexes of small categories with abelian presheaf coefficients.

A composable n-string ``U0 <-s1- U1 <- ... <-sn- Un`` is stored as the tuple
``(U0, s1, ..., sn)``; a cochain assigns to it an element of A(Un). Finite
abelian groups are products of cyclic groups and elements are residue tuples.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import GroupoidError, GuardExceeded
from .groups import invariant_factors


@dataclass(frozen=True)
class FiniteAbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        if any(m < 1 for m in self.moduli):
            raise ValueError("moduli must be positive")

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def invariants(self) -> tuple[int, ...]:
        return invariant_factors(self.moduli)

    def elements(self):
        return itertools.product(*(range(m) for m in self.moduli))

    def reduce(self, v) -> tuple[int, ...]:
        return tuple(int(a) % m for a, m in zip(v, self.moduli))

    def add(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def zero(self):
        return (0,) * len(self.moduli)

    def is_isomorphic(self, other: "FiniteAbelianGroup") -> bool:
        return self.invariants == other.invariants

    def __str__(self):
        return describe(self.invariants)


def describe(invariants: Sequence[int]) -> str:
    inv = [d for d in invariants if d > 1]
    return "×".join(f"Z/{d}" for d in inv) if inv else "0"


# categories

class SmallCategory:
    """Finite category: arrows are hashable ids with dom/cod; compose[(a, b)] = a∘b."""

    def __init__(self, objects: Iterable[Hashable], arrows: Iterable[Hashable], dom: Mapping, cod: Mapping,
                 compose: Mapping, identity: Mapping):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.dom = dict(dom)
        self.cod = dict(cod)
        self.compose = dict(compose)
        self.identity = dict(identity)

    def __repr__(self):
        return f"SmallCategory({len(self.objects)} objects, {len(self.arrows)} arrows)"

    @cached_property
    def into(self) -> dict:
        out: dict = {U: [] for U in self.objects}
        for a in self.arrows:
            out[self.cod[a]].append(a)
        return out

    @cached_property
    def out_of(self) -> dict:
        out: dict = {U: [] for U in self.objects}
        for a in self.arrows:
            out[self.dom[a]].append(a)
        return out

    def strings(self, n: int) -> list[tuple]:
        """All composable n-strings, identities included."""
        return list(self._strings(n))

    def _strings(self, n):
        if n == 0:
            for U in self.objects:
                yield (U,)
            return
        if n == 1:
            for a in self.arrows:
                yield (self.cod[a], a)
            return
        for s in self._strings(n - 1):
            for a in self.into[self.dom[s[-1]]]:
                yield s + (a,)

    def count_strings(self, n: int) -> int:
        # counts by last object via dynamic programming
        if n == 0:
            return len(self.objects)
        ends = {U: 0 for U in self.objects}
        for a in self.arrows:
            ends[self.dom[a]] += 1
        for _ in range(n - 1):
            nxt = {U: 0 for U in self.objects}
            for a in self.arrows:
                nxt[self.dom[a]] += ends[self.cod[a]]
            ends = nxt
        return sum(ends.values())


def last_object(cat: SmallCategory, s: tuple):
    return s[0] if len(s) == 1 else cat.dom[s[-1]]


def validate_category(cat: SmallCategory) -> list[str]:
    out = []
    for U in cat.objects:
        i = cat.identity.get(U)
        if i is None or cat.dom.get(i) != U or cat.cod.get(i) != U:
            out.append(f"object {U} has no identity")
    if out:
        return out
    for a in cat.arrows:
        for b in cat.into[cat.dom[a]]:
            ab = cat.compose.get((a, b))
            if ab is None:
                out.append(f"composite of {a} and {b} missing")
            elif cat.dom[ab] != cat.dom[b] or cat.cod[ab] != cat.cod[a]:
                out.append(f"composite of {a} and {b} has wrong ends")
        if cat.compose.get((cat.identity[cat.cod[a]], a)) != a or cat.compose.get((a, cat.identity[cat.dom[a]])) != a:
            out.append(f"identity law fails at {a}")
    if out:
        return out
    for a in cat.arrows:
        for b in cat.into[cat.dom[a]]:
            ab = cat.compose[(a, b)]
            for c in cat.into[cat.dom[b]]:
                if cat.compose[(ab, c)] != cat.compose[(a, cat.compose[(b, c)])]:
                    out.append(f"associativity fails at ({a},{b},{c})")
                    return out
    return out


def is_subcategory(cat: SmallCategory, arrows: Iterable) -> bool:
    sub = set(arrows)
    if not sub <= set(cat.arrows):
        return False
    objs = {cat.dom[a] for a in sub} | {cat.cod[a] for a in sub}
    if any(cat.identity[U] not in sub for U in objs):
        return False
    return all(cat.compose[(a, b)] in sub for a in sub for b in sub if cat.dom[a] == cat.cod[b])


# presheaves

@dataclass
class AbelianPresheaf:
    """A(U) as a product of cyclic groups; ``restriction[s]`` is the integer matrix of
    A(cod s) -> A(dom s) in those coordinates."""
    at: dict
    restriction: dict

    def matrix(self, a) -> np.ndarray:
        return self.restriction[a]

    def restrict(self, a, v, dom) -> tuple[int, ...]:
        """v in A(cod a) restricted along a, reduced in A(dom)."""
        return self.at[dom].reduce(self.restriction[a] @ np.asarray(v, dtype=np.int64))


def check_presheaf(cat: SmallCategory, A: AbelianPresheaf) -> list[str]:
    """Contravariant functoriality and well-definedness of every restriction matrix."""
    out = []
    for a in cat.arrows:
        M = A.restriction[a]
        src, dst = A.at[cat.cod[a]], A.at[cat.dom[a]]
        if M.shape != (len(dst.moduli), len(src.moduli)):
            out.append(f"restriction along {a} has the wrong shape")
            continue
        for j, mj in enumerate(src.moduli):
            if any((M[i, j] * mj) % mi for i, mi in enumerate(dst.moduli)):
                out.append(f"restriction along {a} is not well defined")
                break
    for U in cat.objects:
        I = A.restriction[cat.identity[U]]
        mods = A.at[U].moduli
        if any((I[i, j] - (i == j)) % mods[i] for i in range(len(mods)) for j in range(len(mods))):
            out.append(f"identity at {U} does not restrict to the identity")
    for a in cat.arrows:
        for b in cat.into[cat.dom[a]]:
            ab = cat.compose[(a, b)]
            lhs = A.restriction[ab]
            rhs = A.restriction[b] @ A.restriction[a]
            mods = A.at[cat.dom[b]].moduli
            if any((lhs[i, j] - rhs[i, j]) % mods[i] for i in range(lhs.shape[0]) for j in range(lhs.shape[1])):
                out.append(f"restriction not functorial at ({a},{b})")
    return out


def direct_sum_presheaf(A: AbelianPresheaf, B: AbelianPresheaf) -> AbelianPresheaf:
    at = {U: FiniteAbelianGroup(A.at[U].moduli + B.at[U].moduli) for U in A.at}
    res = {}
    for a, M in A.restriction.items():
        N = B.restriction[a]
        Z = np.zeros((M.shape[0] + N.shape[0], M.shape[1] + N.shape[1]), dtype=np.int64)
        Z[:M.shape[0], :M.shape[1]] = M
        Z[M.shape[0]:, M.shape[1]:] = N
        res[a] = Z
    return AbelianPresheaf(at, res)


def constant_presheaf(cat: SmallCategory, moduli: Sequence[int]) -> AbelianPresheaf:
    G = FiniteAbelianGroup(tuple(moduli))
    I = np.eye(len(moduli), dtype=np.int64)
    return AbelianPresheaf({U: G for U in cat.objects}, {a: I for a in cat.arrows})


# complexes

class FiniteCochainComplex:
    """Cochain groups C^n (lists of cyclic moduli) with differentials d_n : C^n -> C^{n+1}.

    Degrees are built on demand by ``builder(n) -> (moduli, matrix d_{n-1})``.
    """

    def __init__(self, groups: Mapping[int, Sequence[int]] | None = None,
                 diffs: Mapping[int, np.ndarray] | None = None, builder: Callable | None = None):
        self._groups = {n: tuple(g) for n, g in (groups or {}).items()}
        self._diffs = dict(diffs or {})
        self._builder = builder

    def group(self, n: int) -> tuple[int, ...]:
        if n < 0:
            return ()
        if n not in self._groups:
            if self._builder is None:
                return ()
            self._groups[n] = tuple(self._builder.moduli(n))
        return self._groups[n]

    def d(self, n: int) -> np.ndarray:
        """Matrix of d_n : C^n -> C^{n+1}."""
        if n not in self._diffs:
            rows, cols = len(self.group(n + 1)), len(self.group(n))
            if self._builder is None or n < 0:
                self._diffs[n] = np.zeros((rows, cols), dtype=np.int64)
            else:
                self._diffs[n] = self._builder.differential(n)
        return self._diffs[n]

    def check_dd(self, n: int) -> bool:
        P = self.d(n + 1) @ self.d(n)
        mods = self.group(n + 2)
        return all(not (P[i] % m).any() for i, m in enumerate(mods))


class _CategoryBuilder:
    def __init__(self, cat: SmallCategory, A: AbelianPresheaf, skip: set | None):
        self.cat, self.A, self.skip = cat, A, skip or set()
        self._index: dict[int, tuple[list, dict, list]] = {}

    def is_skipped(self, s: tuple) -> bool:
        if len(s) == 1:
            return s[0] in self.skip_objects
        return all(a in self.skip for a in s[1:])

    @cached_property
    def skip_objects(self) -> set:
        return {self.cat.dom[a] for a in self.skip} | {self.cat.cod[a] for a in self.skip}

    def index(self, n: int):
        """(strings, offset of each string, moduli) for the cochains that are kept."""
        if n not in self._index:
            strings, offs, mods = [], {}, []
            for s in self.cat.strings(n):
                if self.skip and self.is_skipped(s):
                    continue
                offs[s] = len(mods)
                strings.append(s)
                mods.extend(self.A.at[last_object(self.cat, s)].moduli)
            self._index[n] = (strings, offs, mods)
        return self._index[n]

    def moduli(self, n: int):
        return self.index(n)[2]

    def differential(self, n: int) -> np.ndarray:
        cat, A = self.cat, self.A
        rows_s, rows_off, rows_mod = self.index(n + 1)
        _, cols_off, cols_mod = self.index(n)
        D = np.zeros((len(rows_mod), len(cols_mod)), dtype=np.int64)
        for s in rows_s:
            r0 = rows_off[s]
            last = last_object(cat, s)
            dim = len(A.at[last].moduli)
            arrows = s[1:]
            k = len(arrows)  # = n + 1
            faces = []
            # face 0 drops the first arrow
            faces.append((1, (cat.dom[arrows[0]],) + tuple(arrows[1:]), None))
            for i in range(1, k):
                comp = cat.compose[(arrows[i - 1], arrows[i])]
                faces.append(((-1) ** i, (s[0],) + arrows[:i - 1] + (comp,) + arrows[i + 1:], None))
            faces.append(((-1) ** k, (s[0],) + arrows[:-1], arrows[-1]))
            for sign, face, along in faces:
                c0 = cols_off.get(face)
                if c0 is None:
                    continue  # face lies in the skipped subcategory: the cochain vanishes there
                if along is None:
                    for t in range(dim):
                        D[r0 + t, c0 + t] += sign
                else:
                    M = A.restriction[along]
                    D[r0:r0 + M.shape[0], c0:c0 + M.shape[1]] += sign * M
        for i, m in enumerate(rows_mod):
            D[i] %= m
        return D


class CategoryComplex(FiniteCochainComplex):
    """C^n(cat; A), or the relative complex of cochains vanishing on strings of ``relative_to``."""

    def __init__(self, cat: SmallCategory, A: AbelianPresheaf, relative_to: Iterable | None = None):
        rel = set(relative_to) if relative_to is not None else None
        if rel is not None and not is_subcategory(cat, rel):
            raise GroupoidError("relative arrows do not form a subcategory")
        self.cat, self.A = cat, A
        self.relative_to = rel
        super().__init__(builder=_CategoryBuilder(cat, A, rel))

    def strings(self, n: int) -> list[tuple]:
        return self._builder.index(n)[0]

    def offset(self, n: int, s: tuple) -> int:
        return self._builder.index(n)[1][s]

    def to_vector(self, n: int, cochain: Mapping[tuple, Sequence[int]]) -> np.ndarray:
        """Cochain dict -> coordinate vector; strings absent from the dict count as zero."""
        strings, offs, mods = self._builder.index(n)
        v = np.zeros(len(mods), dtype=np.int64)
        for s, val in cochain.items():
            if s not in offs:
                if any(int(a) % m for a, m in zip(val, self.A.at[last_object(self.cat, s)].moduli)):
                    raise GroupoidError(f"cochain is nonzero on the excluded string {s}")
                continue
            o = offs[s]
            v[o:o + len(val)] = val
        return v % np.array(mods, dtype=np.int64) if len(mods) else v

    def to_cochain(self, n: int, v) -> dict[tuple, tuple[int, ...]]:
        strings, offs, mods = self._builder.index(n)
        out = {}
        for s in strings:
            o = offs[s]
            d = len(self.A.at[last_object(self.cat, s)].moduli)
            out[s] = tuple(int(v[o + t]) % mods[o + t] for t in range(d))
        return out


def coboundary(cat: SmallCategory, A: AbelianPresheaf, c: Mapping[tuple, Sequence[int]], n: int) -> dict:
    """d of an (n-1)-cochain given on all (n-1)-strings, by the alternating face sum."""
    out = {}
    for s in cat.strings(n):
        last = last_object(cat, s)
        G = A.at[last]
        arrows = s[1:]
        acc = np.zeros(len(G.moduli), dtype=np.int64)
        acc += np.asarray(c[(cat.dom[arrows[0]],) + tuple(arrows[1:])], dtype=np.int64)
        for i in range(1, n):
            comp = cat.compose[(arrows[i - 1], arrows[i])]
            acc += (-1) ** i * np.asarray(c[(s[0],) + arrows[:i - 1] + (comp,) + arrows[i + 1:]], dtype=np.int64)
        prev = np.asarray(c[(s[0],) + arrows[:-1]], dtype=np.int64)
        acc += (-1) ** n * (A.restriction[arrows[-1]] @ prev)
        out[s] = G.reduce(acc)
    return out


# cohomology

@dataclass
class CohomologyGroup:
    """H^n of a finite cochain complex with coordinates on its cyclic summands."""
    degree: int
    complex: FiniteCochainComplex
    N: int
    V: np.ndarray
    Vinv: np.ndarray
    scale: np.ndarray          # e_i: Z^n = V diag(e) (Z/N)^k
    quotient: linalg.Quotient

    @property
    def orders(self) -> list[int]:
        return self.quotient.summands

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(tuple(self.orders))

    @property
    def invariants(self) -> tuple[int, ...]:
        return invariant_factors(self.orders)

    def __str__(self):
        return describe(self.invariants)

    def _w(self, x):
        Y = (self.Vinv @ (np.asarray(x, dtype=np.int64) % self.N)) % self.N
        if (Y % self.scale).any():
            return None
        return Y // self.scale

    def is_cocycle(self, x) -> bool:
        mods = self.complex.group(self.degree + 1)
        y = self.complex.d(self.degree) @ np.asarray(x, dtype=np.int64)
        return all(int(a) % m == 0 for a, m in zip(y, mods))

    def class_of(self, x) -> tuple[int, ...]:
        if not self.is_cocycle(x):
            raise GroupoidError("not a cocycle")
        w = self._w(x)
        return self.quotient.coords(w)

    def representative(self, coords) -> np.ndarray:
        w = self.quotient.lift(coords)
        X = (self.V @ ((w * self.scale) % self.N)) % self.N
        mods = np.array(self.complex.group(self.degree), dtype=np.int64)
        return X % mods if len(mods) else X

    def representatives(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        return [(c, self.representative(c)) for c in itertools.product(*(range(o) for o in self.orders))]

    def coboundary_witness(self, x) -> np.ndarray | None:
        """Some y with d y = x, or None when x is not a coboundary."""
        n = self.degree
        mods = self.complex.group(n)
        prev = self.complex.group(n - 1)
        if not prev:
            return None if any(int(a) % m for a, m in zip(x, mods)) else np.zeros(0, dtype=np.int64)
        D = self.complex.d(n - 1)
        y = linalg.solve_mod_rows(D, x, mods) if mods else np.zeros(len(prev), dtype=np.int64)
        if y is None:
            return None
        return y % np.array(prev, dtype=np.int64)


def complex_cohomology(cx: FiniteCochainComplex, n: int) -> CohomologyGroup:
    mods = list(cx.group(n))
    nxt = list(cx.group(n + 1))
    prev = list(cx.group(n - 1))
    N = linalg.lcm_all(mods + nxt + prev + [1])
    k = len(mods)
    Dn = cx.d(n) if nxt and k else np.zeros((len(nxt), k), dtype=np.int64)
    rscale = np.array([N // m for m in nxt], dtype=np.int64)
    Dp = (Dn * rscale[:, None]) % N if len(nxt) else np.zeros((0, k), dtype=np.int64)
    Dg = linalg.diagonalize(Dp, N, left=False)
    e = np.ones(k, dtype=np.int64)
    for i in range(Dg.rank):
        e[i] = N // math.gcd(Dg.diag[i], N)
    V, Vinv = Dg.V, Dg.Vinv
    # relations: image of d_{n-1} and the kernel of (Z/N)^k -> C^n, in w-coordinates
    gens = []
    if prev and k:
        Dm = cx.d(n - 1) % N
        gens.append(Dm)
    if k:
        gens.append(np.diag(np.array(mods, dtype=np.int64)) % N)
    R = np.concatenate(gens, axis=1) if gens else np.zeros((k, 0), dtype=np.int64)
    Y = (Vinv @ R) % N
    if (Y % e[:, None]).any():
        raise GroupoidError("d∘d != 0: image not contained in kernel")
    W = Y // e[:, None]
    n_i = N // e
    rel = np.concatenate([W, np.diag(n_i)], axis=1) if k else np.zeros((0, 0), dtype=np.int64)
    Q = linalg.quotient_mod(rel % N, k, N)
    return CohomologyGroup(n, cx, N, V, Vinv, e, Q)


# enumeration backend

def enumerate_kernel(D: np.ndarray, col_mods: Sequence[int], row_mods: Sequence[int],
                     guard: int = 2_000_000) -> list[tuple[int, ...]]:
    """All x with D x = 0 (row r read mod row_mods[r]), by backtracking with propagation."""
    k = len(col_mods)
    rows = []
    for r in range(D.shape[0]):
        nz = [(j, int(D[r, j]) % row_mods[r]) for j in range(k) if int(D[r, j]) % row_mods[r]]
        if nz:
            rows.append((row_mods[r], nz))
    var_rows: list[list[int]] = [[] for _ in range(k)]
    for ri, (_, nz) in enumerate(rows):
        for j, _c in nz:
            var_rows[j].append(ri)
    x = [None] * k
    out: list[tuple[int, ...]] = []
    unassigned = [len(nz) for _, nz in rows]

    def allowed(j):
        vals = []
        for v in range(col_mods[j]):
            ok = True
            for ri in var_rows[j]:
                if unassigned[ri] == 1:
                    m, nz = rows[ri]
                    s = 0
                    for jj, c in nz:
                        s += c * (v if jj == j else x[jj])
                    if s % m:
                        ok = False
                        break
            if ok:
                vals.append(v)
        return vals

    def pick():
        best, bj = None, None
        for j in range(k):
            if x[j] is None:
                score = min((unassigned[ri] for ri in var_rows[j]), default=10 ** 9)
                if best is None or score < best:
                    best, bj = score, j
                    if score == 1:
                        break
        return bj

    def rec(depth):
        if depth == k:
            out.append(tuple(x))
            if len(out) > guard:
                raise GuardExceeded(len(out), guard, "kernel enumeration")
            return
        j = pick()
        for v in allowed(j):
            x[j] = v
            for ri in var_rows[j]:
                unassigned[ri] -= 1
            rec(depth + 1)
            for ri in var_rows[j]:
                unassigned[ri] += 1
            x[j] = None
    rec(0)
    return out


def subgroup_closure(gens: Iterable[Sequence[int]], mods: Sequence[int], guard: int = 2_000_000) -> set:
    zero = (0,) * len(mods)
    span = {zero}
    gens = [tuple(int(a) % m for a, m in zip(g, mods)) for g in gens]
    gens = [g for g in gens if g != zero]
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % m for a, b, m in zip(x, g, mods))
                if y not in span:
                    span.add(y)
                    nxt.append(y)
                    if len(span) > guard:
                        raise GuardExceeded(len(span), guard, "subgroup closure")
        frontier = nxt
    return span


@dataclass
class EnumeratedCohomology:
    order: int
    cocycles: list
    coboundaries: set
    invariants: tuple[int, ...]


def enumerate_cohomology(cx: FiniteCochainComplex, n: int, guard: int = 2_000_000) -> EnumeratedCohomology:
    """H^n by listing every cocycle and coboundary; an oracle for small complexes."""
    mods = list(cx.group(n))
    nxt = list(cx.group(n + 1))
    Z = enumerate_kernel(cx.d(n), mods, nxt, guard) if mods else [()]
    prev = cx.group(n - 1)
    if prev and mods:
        D = cx.d(n - 1)
        gens = [tuple(int(D[i, j]) for i in range(D.shape[0])) for j in range(D.shape[1])]
    else:
        gens = []
    B = subgroup_closure(gens, mods, guard)
    if len(Z) % len(B):
        raise GroupoidError("coboundaries do not form a subgroup of the cocycles")
    order = len(Z) // len(B)
    return EnumeratedCohomology(order, Z, B, _invariants_from_profile(Z, B, mods, order))


def _invariants_from_profile(Z, B, mods, order) -> tuple[int, ...]:
    """Recover the isomorphism type of Z/B from #{z : k z in B} for prime powers k."""
    from .groups import _factor
    if order == 1:
        return ()
    parts = []
    for p, e in _factor(order).items():
        logs = [0]
        for t in range(1, e + 1):
            k = p ** t
            cnt = sum(1 for z in Z if tuple((k * a) % m for a, m in zip(z, mods)) in B) // len(B)
            logs.append(round(math.log(cnt, p)))
        steps = [logs[t] - logs[t - 1] for t in range(1, e + 1)]
        for t in range(1, e + 1):
            nxt = steps[t] if t < e else 0
            parts += [p ** t] * (steps[t - 1] - nxt)
    return invariant_factors(parts)


def relative_cohomology(cat: SmallCategory, sub_arrows: Iterable, A: AbelianPresheaf, n: int) -> CohomologyGroup:
    return complex_cohomology(CategoryComplex(cat, A, relative_to=sub_arrows), n)


# long exact sequence

@dataclass
class ExactnessReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    groups: dict = field(default_factory=dict)


def _restricted_subcategory(cat: SmallCategory, sub: set) -> SmallCategory:
    objs = [U for U in cat.objects if cat.identity[U] in sub]
    arrows = [a for a in cat.arrows if a in sub]
    comp = {(a, b): ab for (a, b), ab in cat.compose.items() if a in sub and b in sub}
    return SmallCategory(objs, arrows, {a: cat.dom[a] for a in arrows}, {a: cat.cod[a] for a in arrows},
                         comp, {U: cat.identity[U] for U in objs})


def les_check(cat: SmallCategory, sub_arrows: Iterable, A: AbelianPresheaf, max_degree: int,
              element_limit: int = 4096) -> ExactnessReport:
    """Exactness of ... -> H^n(E,D) -> H^n(E) -> H^n(D) -> H^{n+1}(E,D) -> ... for n <= max_degree,
    checked element by element on the (small) cohomology groups."""
    sub = set(sub_arrows)
    D = _restricted_subcategory(cat, sub)
    AD = AbelianPresheaf({U: A.at[U] for U in D.objects}, {a: A.restriction[a] for a in D.arrows})
    rel = CategoryComplex(cat, A, relative_to=sub)
    absl = CategoryComplex(cat, A)
    dcx = CategoryComplex(D, AD)
    H = {}
    for n in range(max_degree + 2):
        H[("rel", n)] = complex_cohomology(rel, n)
    for n in range(max_degree + 1):
        H[("abs", n)] = complex_cohomology(absl, n)
        H[("sub", n)] = complex_cohomology(dcx, n)
    rep = ExactnessReport(True, groups={f"{k[0]}{k[1]}": str(v) for k, v in H.items()})

    def include(n, x):  # relative cochain -> absolute cochain (extend by zero)
        c = rel.to_cochain(n, x)
        return absl.to_vector(n, c)

    def restrict(n, x):
        c = absl.to_cochain(n, x)
        return dcx.to_vector(n, {s: v for s, v in c.items() if all(a in sub for a in s[1:]) and s[0] in D.objects})

    def connect(n, x):
        c = dcx.to_cochain(n, x)
        X = absl.to_vector(n, c)
        dX = (absl.d(n) @ X)
        dc = absl.to_cochain(n + 1, dX)
        return rel.to_vector(n + 1, {s: v for s, v in dc.items() if s in set(rel.strings(n + 1))})

    def elems(HG):
        if HG.order > element_limit:
            raise GuardExceeded(HG.order, element_limit, "cohomology group")
        return list(itertools.product(*(range(o) for o in HG.orders)))

    def image_set(src, dst, f):
        return {dst.class_of(f(src.representative(c))) for c in elems(src)}

    def kernel_set(src, dst, f):
        zero = tuple(0 for _ in dst.orders)
        return {c for c in elems(src) if dst.class_of(f(src.representative(c))) == zero}

    for n in range(max_degree + 1):
        Hr, Ha, Hs, Hr1 = H[("rel", n)], H[("abs", n)], H[("sub", n)], H[("rel", n + 1)]
        f = lambda x, n=n: include(n, x)
        g = lambda x, n=n: restrict(n, x)
        h = lambda x, n=n: connect(n, x)
        # exact at H^n(E)
        if image_set(Hr, Ha, f) != kernel_set(Ha, Hs, g):
            rep.ok = False
            rep.failures.append(f"not exact at H^{n}(E)")
        # exact at H^n(D)
        if image_set(Ha, Hs, g) != kernel_set(Hs, Hr1, h):
            rep.ok = False
            rep.failures.append(f"not exact at H^{n}(D)")
        # exact at H^{n+1}(E,D)
        if n + 1 <= max_degree:
            Ha1 = H[("abs", n + 1)]
            if image_set(Hs, Hr1, h) != kernel_set(Hr1, Ha1, lambda x, n=n: include(n + 1, x)):
                rep.ok = False
                rep.failures.append(f"not exact at H^{n + 1}(E,D)")
    # exactness at H^0(E,D): the inclusion is injective there
    z = kernel_set(H[("rel", 0)], H[("abs", 0)], lambda x: include(0, x))
    if len(z) != 1:
        rep.ok = False
        rep.failures.append("H^0(E,D) -> H^0(E) not injective")
    return rep
