"""Finite groups stored as Cayley tables.

Elements are the integers ``0..n-1``; ``labels`` carries the printable names.
"""
from __future__ import annotations

import itertools
import math
import re
from functools import cached_property
from typing import Iterable, Sequence


class FiniteGroup:
    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 name: str | None = None):
        n = len(table)
        if n == 0:
            raise ValueError("a group has at least one element")
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table is not square")
        self.labels = tuple(str(l) for l in labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(set(self.labels)) != n or len(self.labels) != n:
            raise ValueError("element labels must be distinct, one per element")
        self.name = name
        problems = group_table_problems(self.table)
        if problems:
            raise ValueError("not a group: " + problems[0])
        self.identity = next(e for e in range(n) if all(self.table[e][a] == a for a in range(n)))
        inv = [0] * n
        for a in range(n):
            inv[a] = next(b for b in range(n) if self.table[a][b] == self.identity)
        self._inv = tuple(inv)
        self._index = {l: i for i, l in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.table)

    def __iter__(self):
        return iter(range(len(self.table)))

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table and self.labels == other.labels

    def __hash__(self):
        return hash((self.table, self.labels))

    def __repr__(self):
        return f"FiniteGroup({self.name or len(self)})"

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def prod(self, *elems: int) -> int:
        out = self.identity
        for e in elems:
            out = self.table[out][e]
        return out

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self._inv[a], -k
        out = self.identity
        for _ in range(k):
            out = self.table[out][a]
        return out

    def conj(self, g: int, a: int) -> int:
        """g a g^-1"""
        return self.table[self.table[g][a]][self._inv[g]]

    def label(self, a: int) -> str:
        return self.labels[a]

    def index(self, label: str) -> int:
        return self._index[str(label)]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        n = len(self)
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a + 1, n))

    @cached_property
    def center(self) -> tuple[int, ...]:
        n = len(self)
        return tuple(z for z in range(n) if all(self.table[z][a] == self.table[a][z] for a in range(n)))

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens``."""
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set chosen greedily by decreasing element order."""
        gens: list[int] = []
        span = frozenset([self.identity])
        for a in sorted(range(len(self)), key=lambda a: (-self.element_order(a), a)):
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
                if len(span) == len(self):
                    break
        return tuple(gens)

    def words(self) -> dict[int, tuple[int, ...]]:
        """Shortest word in ``generators`` for every element (breadth first)."""
        words = {self.identity: ()}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = self.table[x][g]
                    if y not in words:
                        words[y] = words[x] + (g,)
                        nxt.append(y)
            frontier = nxt
        return words

    def homomorphisms(self, other: "FiniteGroup", injective: bool = False) -> list[tuple[int, ...]]:
        """All homomorphisms self -> other, as image tuples, by search over generator images."""
        gens = self.generators
        words = self.words()
        out = []
        orders = [self.element_order(g) for g in gens]
        cands = [[b for b in other if orders[i] % other.element_order(b) == 0] for i in range(len(gens))]
        for imgs in itertools.product(*cands):
            phi = [other.identity] * len(self)
            for x, w in words.items():
                phi[x] = other.prod(*(imgs[gens.index(g)] for g in w))
            if not is_homomorphism(self, other, phi):
                continue
            if injective and len(set(phi)) != len(phi):
                continue
            out.append(tuple(phi))
        return out

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.homomorphisms(self, injective=True))

    @cached_property
    def inner_automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """Distinct inner automorphisms, identity first."""
        seen: dict[tuple[int, ...], int] = {}
        for g in self:
            seen.setdefault(tuple(self.conj(g, a) for a in self), g)
        return tuple(sorted(seen, key=lambda f: (f != tuple(range(len(self))), seen[f])))

    def inner_witnesses(self) -> dict[tuple[int, ...], int]:
        """Map each inner automorphism to the least element inducing it."""
        out: dict[tuple[int, ...], int] = {}
        for g in self:
            out.setdefault(tuple(self.conj(g, a) for a in self), g)
        return out

    def isomorphism(self, other: "FiniteGroup") -> tuple[int, ...] | None:
        if len(self) != len(other):
            return None
        for phi in self.homomorphisms(other, injective=True):
            return phi
        return None


def group_table_problems(table: Sequence[Sequence[int]]) -> list[str]:
    """Group-axiom violations of a square table on ``range(n)``."""
    n = len(table)
    out = []
    for row in table:
        for v in row:
            if not 0 <= v < n:
                return [f"entry {v} out of range"]
    ids = [e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))]
    if not ids:
        out.append("no two-sided identity")
        return out
    e = ids[0]
    for a in range(n):
        if not any(table[a][b] == e and table[b][a] == e for b in range(n)):
            out.append(f"element {a} has no inverse")
    for a in range(n):
        for b in range(n):
            ab = table[a][b]
            for c in range(n):
                if table[ab][c] != table[a][table[b][c]]:
                    out.append(f"associativity fails at ({a},{b},{c})")
                    return out
    return out


def is_homomorphism(g: FiniteGroup, h: FiniteGroup, phi: Sequence[int]) -> bool:
    return all(phi[g.table[a][b]] == h.table[phi[a]][phi[b]] for a in g for b in g)


# constructors

def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], [str(i) for i in range(n)], f"Z/{n}")


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def _cycle_label(p: tuple[int, ...]) -> str:
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = p[j]
        parts.append("(" + "".join(cyc) + ")")
    return "".join(parts) or "()"


def symmetric(n: int) -> FiniteGroup:
    """Permutations of 1..n composed right to left: (pq)(i) = p(q(i))."""
    perms = sorted(itertools.permutations(range(n)), key=lambda p: (p != tuple(range(n)), p))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FiniteGroup(table, [_cycle_label(p) for p in perms], f"S{n}")


def dihedral(order: int) -> FiniteGroup:
    """Dihedral group of the given (even) order; elements r^i and s r^i."""
    if order % 2 or order < 2:
        raise ValueError("dihedral order must be even")
    n = order // 2
    elems = [(0, i) for i in range(n)] + [(1, i) for i in range(n)]
    idx = {e: k for k, e in enumerate(elems)}

    def mul(a, b):
        (s1, i1), (s2, i2) = a, b
        # s r^i s = r^-i
        return (s1 ^ s2, ((-i1 if s2 else i1) + i2) % n)
    labels = [f"r{i}" for i in range(n)] + [f"sr{i}" for i in range(n)]
    return FiniteGroup([[idx[mul(a, b)] for b in elems] for a in elems], labels, f"D{order}")


def direct_product(*groups: FiniteGroup) -> FiniteGroup:
    if not groups:
        return trivial_group()
    elems = list(itertools.product(*(range(len(g)) for g in groups)))
    idx = {e: i for i, e in enumerate(elems)}
    table = [[idx[tuple(g.table[x][y] for g, x, y in zip(groups, a, b))] for b in elems] for a in elems]
    if len(groups) == 1:
        labels = list(groups[0].labels)
    else:
        labels = ["(" + ",".join(g.labels[c] for g, c in zip(groups, e)) + ")" for e in elems]
    name = "×".join(g.name or "?" for g in groups) if all(g.name for g in groups) else None
    return FiniteGroup(table, labels, name)


_SHORTHAND = re.compile(r"^(?:Z/(\d+)|C(\d+)|S(\d+)|D(\d+)|1)$")


def parse_group(text: str) -> FiniteGroup:
    """Expand shorthands such as ``Z/4``, ``S3``, ``D12`` and products ``Z/2×Z/2``."""
    parts = [p.strip() for p in re.split(r"[×x*]", text) if p.strip()]
    if not parts:
        raise ValueError(f"empty group shorthand {text!r}")
    groups = []
    for p in parts:
        m = _SHORTHAND.match(p)
        if not m:
            raise ValueError(f"unknown group shorthand {p!r}")
        if m.group(1) or m.group(2):
            groups.append(cyclic(int(m.group(1) or m.group(2))))
        elif m.group(3):
            groups.append(symmetric(int(m.group(3))))
        elif m.group(4):
            groups.append(dihedral(int(m.group(4))))
        else:
            groups.append(trivial_group())
    g = groups[0] if len(groups) == 1 else direct_product(*groups)
    g.name = "×".join(parts)
    return g


# abelian structure

def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(moduli: Iterable[int]) -> tuple[int, ...]:
    """Canonical invariant factors d_1 | d_2 | ... of a product of cyclic groups (trivial factors dropped)."""
    parts: dict[int, list[int]] = {}
    for m in moduli:
        for p, e in _factor(int(m)).items():
            parts.setdefault(p, []).append(e)
    if not parts:
        return ()
    for p in parts:
        parts[p].sort(reverse=True)
    r = max(len(v) for v in parts.values())
    out = []
    for i in range(r):
        d = 1
        for p, exps in parts.items():
            if i < len(exps):
                d *= p ** exps[i]
        out.append(d)
    return tuple(sorted(out))


def abelian_decomposition(g: FiniteGroup) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Invariant factors and matching generators so that (a_i) -> sum a_i g_i is a bijection."""
    if not g.is_abelian:
        raise ValueError("group is not abelian")
    n = len(g)
    # #{x : kx = 0} determines the group; read off p-parts from it
    moduli = []
    for p, e in _factor(n).items():
        killed = []
        for k in range(e + 1):
            killed.append(sum(1 for x in g if g.power(x, p ** k) == g.identity))
        # killed[k] = p^(sum_i min(k, lambda_i))
        logs = [round(math.log(c, p)) for c in killed]
        steps = [logs[k] - logs[k - 1] for k in range(1, e + 1)]  # #{i: lambda_i >= k}
        lam = []
        for k in range(1, e + 1):
            nxt = steps[k] if k < e else 0
            lam += [k] * (steps[k - 1] - nxt)
        moduli += [p ** l for l in lam]
    inv = invariant_factors(moduli)
    gens = _search_basis(g, inv)
    return inv, gens


def _search_basis(g: FiniteGroup, inv: tuple[int, ...]) -> tuple[int, ...]:
    order_of = {x: g.element_order(x) for x in g}

    def rec(chosen: list[int], span: frozenset[int]):
        i = len(chosen)
        if i == len(inv):
            return tuple(chosen) if len(span) == len(g) else None
        want = inv[len(inv) - 1 - i]  # largest first
        for x in g:
            if order_of[x] != want:
                continue
            cyc = g.closure([x])
            if len(cyc & span) != 1:
                continue
            new = g.closure(chosen + [x])
            if len(new) != len(span) * want:
                continue
            res = rec(chosen + [x], new)
            if res is not None:
                return res
        return None
    res = rec([], frozenset([g.identity]))
    if res is None:
        raise RuntimeError("no basis found for abelian group")
    return tuple(reversed(res))


class AbelianCoordinates:
    """Isomorphism between an abelian FiniteGroup and a product of cyclic groups."""

    def __init__(self, g: FiniteGroup):
        self.group = g
        self.moduli, self.gens = abelian_decomposition(g)
        self._to: dict[int, tuple[int, ...]] = {}
        self._from: dict[tuple[int, ...], int] = {}
        for vec in itertools.product(*(range(m) for m in self.moduli)):
            x = g.identity
            for a, gen in zip(vec, self.gens):
                x = g.table[x][g.power(gen, a)]
            self._to[x] = vec
            self._from[vec] = x

    def to_vec(self, x: int) -> tuple[int, ...]:
        return self._to[x]

    def from_vec(self, vec: Sequence[int]) -> int:
        return self._from[tuple(int(a) % m for a, m in zip(vec, self.moduli))]


_COORDS: dict[FiniteGroup, AbelianCoordinates] = {}


def coordinates(g: FiniteGroup) -> AbelianCoordinates:
    c = _COORDS.get(g)
    if c is None:
        c = _COORDS[g] = AbelianCoordinates(g)
    return c
