"""Brute-force oracles, independent of the embedding-category machinery.

* the normalized bar complex of a groupoid, solved by enumeration;
* factor-set enumeration of all extensions of E by K with prescribed conjugation maps;
* random Schreier extensions for property sweeps.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded
from .extension import Extension, extensions_isomorphic, validate_extension
from .groupoid import FiniteGroupoid, GroupBundle
from .groups import coordinates
from .linalg import kernel_mod, lcm_all


# normalized bar complex

def bar_strings(E: FiniteGroupoid, n: int) -> list[tuple]:
    """Composable strings (e1, ..., en) of non-unit arrows, e_i∘e_{i+1} defined; n=0 gives objects."""
    if n == 0:
        return [(x,) for x in E.objects]
    nonunit = [g for g in E.arrows if not E.is_unit(g)]
    out = [(g,) for g in nonunit]
    for _ in range(n - 1):
        out = [s + (g,) for s in out for g in nonunit if E.src[s[-1]] == E.tgt[g]]
    return out


def _value_fiber(E: FiniteGroupoid, s: tuple, n: int):
    return s[0] if n == 0 else E.src[s[-1]]


def bar_coboundary(E: FiniteGroupoid, K: GroupBundle, action: dict, c: dict, n: int) -> dict:
    """d of a normalized n-cochain; ``action[e][k]`` is k·e. Cochains vanish off their keys."""
    def val(s):
        if n == 0:
            return c[s]
        if any(E.is_unit(g) for g in s):
            return K[_value_fiber(E, s, n)].identity
        return c[s]

    out = {}
    for s in bar_strings(E, n + 1):
        x = E.src[s[-1]]
        Kx = K[x]
        acc = Kx.identity
        terms = []
        if n == 0:
            terms.append((1, val((x,))))
            terms.append((-1, action[s[0]][val((E.tgt[s[0]],))]))
        else:
            terms.append((1, val(s[1:])))
            for i in range(n):
                merged = s[:i] + (E.mul(s[i], s[i + 1]),) + s[i + 2:]
                terms.append(((-1) ** (i + 1), val(merged)))
            terms.append(((-1) ** (n + 1), action[s[-1]][val(s[:-1])]))
        for sign, v in terms:
            acc = Kx.mul(acc, v if sign > 0 else Kx.inv(v))
        out[s] = acc
    return out


@dataclass
class BarCohomology:
    degree: int
    cocycles: int
    coboundaries: int
    exponent_profile: dict     # element order -> number of classes of that order

    @property
    def order(self) -> int:
        return self.cocycles // self.coboundaries

    @property
    def invariants(self) -> tuple[int, ...]:
        return _invariants(self.exponent_profile)


def _invariants(profile: dict) -> tuple[int, ...]:
    """Invariant factors of a finite abelian group from its element-order counts.

    With a_i the exponents of the cyclic p-parts, #{g : p^k g = 0} = p^(Σ min(k, a_i)).
    """
    order = sum(profile.values())
    primes = [p for p in range(2, order + 1) if order % p == 0 and all(p % q for q in range(2, p))]
    per_prime = []
    for p in primes:
        killed = [1]
        k = 1
        while killed[-1] < _p_part(order, p):
            killed.append(sum(c for o, c in profile.items() if _p_part(o, p) <= p ** k))
            k += 1
        at_least = [round(math.log(killed[k] // killed[k - 1], p)) for k in range(1, len(killed))]
        parts = []
        for k, cnt in enumerate(at_least):
            nxt = at_least[k + 1] if k + 1 < len(at_least) else 0
            parts += [p ** (k + 1)] * (cnt - nxt)
        per_prime.append(sorted(parts, reverse=True))
    width = max((len(f) for f in per_prime), default=0)
    out = []
    for i in range(width):
        out.append(math.prod(f[i] for f in per_prime if i < len(f)))
    return tuple(sorted(out))


def _p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def _enumerate_bar_cocycles(E, K, action, n, guard):
    """All normalized n-cocycles as tuples aligned with bar_strings(E, n), by backtracking."""
    strings = bar_strings(E, n)
    pos = {s: i for i, s in enumerate(strings)}
    fibers = [K[_value_fiber(E, s, n)] for s in strings]
    # each (n+1)-string constraint is checked once its last face is assigned
    checks: dict[int, list] = {}
    for t in bar_strings(E, n + 1):
        faces = [t[1:]] + [t[:i] + (E.mul(t[i], t[i + 1]),) + t[i + 2:] for i in range(n)] + [t[:-1]]
        idx = [pos[f] for f in faces if f in pos]
        last = max(idx) if idx else -1
        checks.setdefault(last, []).append(t)
    out = []
    values = [0] * len(strings)
    visited = [0]

    view = _IndexView(pos, values)

    def holds(t):
        return _single_coboundary(E, K, action, view, n, t) == K[E.src[t[-1]]].identity

    def rec(i):
        visited[0] += 1
        if visited[0] > guard:
            raise GuardExceeded(visited[0], guard, "bar cocycle search")
        if i == len(strings):
            out.append(tuple(values))
            return
        for v in fibers[i]:
            values[i] = v
            if all(holds(t) for t in checks.get(i, ())):
                rec(i + 1)
        values[i] = fibers[i].identity

    if all(holds(t) for t in checks.get(-1, ())):
        rec(0)
    return strings, out


class _IndexView:
    def __init__(self, pos, values):
        self.pos, self.values = pos, values

    def __getitem__(self, s):
        return self.values[self.pos[s]]


def _single_coboundary(E, K, action, c, n, t):
    x = E.src[t[-1]]
    Kx = K[x]

    def val(s):
        if n == 0:
            return c[s]
        if any(E.is_unit(g) for g in s):
            return K[E.src[s[-1]]].identity
        return c[s]

    if n == 0:
        terms = [(1, val((x,))), (-1, action[t[0]][val((E.tgt[t[0]],))])]
    else:
        terms = [(1, val(t[1:]))]
        for i in range(n):
            terms.append(((-1) ** (i + 1), val(t[:i] + (E.mul(t[i], t[i + 1]),) + t[i + 2:])))
        terms.append(((-1) ** (n + 1), action[t[-1]][val(t[:-1])]))
    acc = Kx.identity
    for sign, v in terms:
        acc = Kx.mul(acc, v if sign > 0 else Kx.inv(v))
    return acc


def bar_cohomology(E: FiniteGroupoid, K: GroupBundle, action: dict, n: int, guard: int = 2_000_000) -> BarCohomology:
    """H^n(E; K) from the normalized bar complex by exhaustive enumeration (abelian K)."""
    strings, Z = _enumerate_bar_cocycles(E, K, action, n, guard)
    fibers = [K[_value_fiber(E, s, n)] for s in strings]
    zero = tuple(F.identity for F in fibers)
    # coboundaries: closure of the images of single-point 1-cochains
    gens = set()
    if n > 0:
        prev = bar_strings(E, n - 1)
        for s in prev:
            F = K[_value_fiber(E, s, n - 1)]
            for k in F.generators or (F.identity,):
                c = {t: K[_value_fiber(E, t, n - 1)].identity for t in prev}
                c[s] = k
                d = bar_coboundary(E, K, action, c, n - 1)
                gens.add(tuple(d[t] for t in strings))
    B = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for b in frontier:
            for g in gens:
                s = tuple(F.mul(u, v) for F, u, v in zip(fibers, b, g))
                if s not in B:
                    B.add(s)
                    nxt.append(s)
        if len(B) > guard:
            raise GuardExceeded(len(B), guard, "coboundary closure")
        frontier = nxt
    # class orders: order of z in Z/B
    profile: dict = {}
    seen = set()
    for z in Z:
        key = _coset_key(z, B, fibers)
        if key in seen:
            continue
        seen.add(key)
        k, acc = 1, z
        while acc not in B:
            acc = tuple(F.mul(u, v) for F, u, v in zip(fibers, acc, z))
            k += 1
        profile[k] = profile.get(k, 0) + 1
    return BarCohomology(n, len(Z), len(B), profile)


def _coset_key(z, B, fibers):
    return min(tuple(F.mul(u, v) for F, u, v in zip(fibers, z, b)) for b in B)


# extensions from factor sets

@dataclass
class FactorSet:
    """[f,l][e,k] = [fe, c(f,e)·φ_e(l)·k]; φ_e: K_{tgt e} -> K_{src e}; c(f,e) in K_{src e}."""
    E: FiniteGroupoid
    K: GroupBundle
    phi: dict
    c: dict          # (f, e) -> element, for non-unit composable pairs

    def cval(self, f, e) -> int:
        if self.E.is_unit(f) or self.E.is_unit(e):
            return self.K[self.E.src[e]].identity
        return self.c[(f, e)]


def factor_set_extension(fs: FactorSet, names: dict | None = None) -> Extension:
    """The extension with arrows (e, k), k in K_{src e}; ``names`` optionally relabels them."""
    E, K = fs.E, fs.K
    label = (lambda e, k: names[(e, k)]) if names else (lambda e, k: f"<{e}|{K[E.src[e]].label(k)}>")
    arrows, compose = {}, {}
    for e in E.arrows:
        for k in K[E.src[e]]:
            arrows[label(e, k)] = (E.src[e], E.tgt[e])
    for (f, e), fe in E.compose.items():
        x = E.src[e]
        Kx = K[x]
        c = fs.cval(f, e)
        ph = fs.phi[e]
        for l in K[E.tgt[e]]:
            for k in Kx:
                compose[(label(f, l), label(e, k))] = label(fe, Kx.prod(c, ph[l], k))
    units = {x: label(E.units[x], K[x].identity) for x in E.objects}
    G = FiniteGroupoid(E.objects, arrows, compose, units)
    j = {x: tuple(label(E.units[x], k) for k in K[x]) for x in E.objects}
    pi = {label(e, k): e for e in E.arrows for k in K[E.src[e]]}
    return Extension(K, G, E, j, pi)


def _factor_set_search(E, K, phi, guard, rng=None):
    """Yield every normalized factor set c compatible with φ, by backtracking on composable pairs."""
    pairs = [(f, e) for (f, e) in E.compose if not E.is_unit(f) and not E.is_unit(e)]
    pairs.sort()
    if rng is not None:
        rng.shuffle(pairs)
    pos = {p: i for i, p in enumerate(pairs)}
    triples = [(g, f, e) for (g, f) in E.compose for e in E.into(E.src[f])
               if not any(E.is_unit(a) for a in (g, f, e))]
    checks: dict[int, list] = {}
    for t in triples:
        g, f, e = t
        ids = [pos[p] for p in ((g, f), (E.mul(g, f), e), (g, E.mul(f, e)), (f, e)) if p in pos]
        checks.setdefault(max(ids) if ids else -1, []).append(t)
    c: dict = {}
    counter = [0]

    def cv(f, e):
        if E.is_unit(f) or E.is_unit(e):
            return K[E.src[e]].identity
        return c[(f, e)]

    def holds(t):
        # c(gf,e)·φ_e(c(g,f))·φ_e(φ_f(m)) = c(g,fe)·φ_fe(m)·c(f,e) for all m in K_{tgt g}
        g, f, e = t
        x = E.src[e]
        Kx = K[x]
        left0 = Kx.mul(cv(E.mul(g, f), e), phi[e][cv(g, f)])
        right0 = cv(g, E.mul(f, e))
        cfe = cv(f, e)
        pe, pf, pfe = phi[e], phi[f], phi[E.mul(f, e)]
        for m in K[E.tgt[g]]:
            if Kx.mul(left0, pe[pf[m]]) != Kx.prod(right0, pfe[m], cfe):
                return False
        return True

    def rec(i):
        counter[0] += 1
        if counter[0] > guard:
            raise GuardExceeded(counter[0], guard, "factor-set search")
        if i == len(pairs):
            yield dict(c)
            return
        f, e = pairs[i]
        vals = list(K[E.src[e]])
        if rng is not None:
            rng.shuffle(vals)
        for v in vals:
            c[pairs[i]] = v
            if all(holds(t) for t in checks.get(i, ())):
                yield from rec(i + 1)
        del c[pairs[i]]

    if all(holds(t) for t in checks.get(-1, ())):
        yield from rec(0)


def _phi_assignments(E, K, phi_choices):
    keys = [e for e in E.arrows if not E.is_unit(e)]
    for combo in itertools.product(*(phi_choices[e] for e in keys)):
        phi = dict(zip(keys, combo))
        for x in E.objects:
            phi[E.units[x]] = tuple(K[x])
        yield phi


def action_phi_choices(E: FiniteGroupoid, action: dict) -> dict:
    """A fixed action: φ_e(l) = l·e."""
    return {e: [tuple(action[e])] for e in E.arrows}


def band_phi_choices(E: FiniteGroupoid, K: GroupBundle, base: dict) -> dict:
    """Every representative of the outer classes of ``base``: inner automorphism ∘ base[e]."""
    out = {}
    for e in E.arrows:
        Kx = K[E.src[e]]
        reps = {tuple(inner[b] for b in base[e]) for inner in Kx.inner_automorphisms}
        out[e] = sorted(reps)
    return out


@dataclass
class EnumerationResult:
    tables: int               # factor sets satisfying associativity
    classes: list             # one Extension per isomorphism class


def enumerate_extensions(E: FiniteGroupoid, K: GroupBundle, phi_choices: dict,
                         guard: int = 10_000_000) -> EnumerationResult:
    """All extensions with normalized factor sets over the given φ candidates, up to isomorphism."""
    reps: list[Extension] = []
    tables = 0
    for phi in _phi_assignments(E, K, phi_choices):
        for c in _factor_set_search(E, K, phi, guard):
            ext = factor_set_extension(FactorSet(E, K, phi, c))
            problems = validate_extension(ext)
            if problems:      # the per-triple test above is complete; this is a second guard
                continue
            tables += 1
            if not any(extensions_isomorphic(ext, r) is not None for r in reps):
                reps.append(ext)
    return EnumerationResult(tables, reps)


# random Schreier extensions

def random_bar_cocycle(E: FiniteGroupoid, K: GroupBundle, action: dict, rng: random.Random) -> dict:
    """A uniformly random normalized 2-cocycle, from a kernel basis of the bar differential."""
    strings = bar_strings(E, 2)
    triples = bar_strings(E, 3)
    co = {x: coordinates(K[x]) for x in K.base}
    cols, col_mods = [], []
    for s in strings:
        x = E.src[s[-1]]
        for i, m in enumerate(co[x].moduli):
            cols.append((s, i))
            col_mods.append(m)
    rows, row_mods = [], []
    for t in triples:
        x = E.src[t[-1]]
        for i, m in enumerate(co[x].moduli):
            rows.append((t, i))
            row_mods.append(m)
    if not cols:
        return {}
    N = lcm_all(col_mods + row_mods + [1])
    A = np.zeros((len(rows), len(cols)), dtype=np.int64)
    row_at = {r: i for i, r in enumerate(rows)}
    # column of the basis cochain: d of the unit vector at (s, i)
    for j, (s, i) in enumerate(cols):
        x = E.src[s[-1]]
        vec = [0] * len(co[x].moduli)
        vec[i] = 1
        c = {u: K[E.src[u[-1]]].identity for u in strings}
        c[s] = co[x].from_vec(vec)
        d = bar_coboundary(E, K, action, c, 2)
        for t, val in d.items():
            y = E.src[t[-1]]
            for r, v in enumerate(co[y].to_vec(val)):
                A[row_at[(t, r)], j] = v * (N // co[y].moduli[r])
    if not rows:
        gens, orders = np.eye(len(cols), dtype=np.int64), col_mods
    else:
        A %= N
        gens, orders = kernel_mod(A, N)
    coeffs = np.array([rng.randrange(N) for _ in range(gens.shape[1])], dtype=np.int64)
    vec = (gens @ coeffs) % N if gens.shape[1] else np.zeros(len(cols), dtype=np.int64)
    out = {}
    for s in strings:
        x = E.src[s[-1]]
        parts = [int(vec[cols.index((s, i))]) % m for i, m in enumerate(co[x].moduli)]
        out[s] = co[x].from_vec(parts)
    return out


def random_schreier_extension(E: FiniteGroupoid, K: GroupBundle, action: dict, seed: int,
                              relabel: bool = True) -> Extension:
    """Schreier extension from a random normalized cocycle, arrows renamed at random."""
    rng = random.Random(seed)
    c2 = random_bar_cocycle(E, K, action, rng)
    c = {(s[0], s[1]): v for s, v in c2.items()}
    phi = {e: tuple(action[e]) for e in E.arrows}
    names = None
    if relabel:
        keys = [(e, k) for e in E.arrows for k in K[E.src[e]]]
        perm = list(range(len(keys)))
        rng.shuffle(perm)
        names = {key: f"g{perm[i]:03d}" for i, key in enumerate(keys)}
    return factor_set_extension(FactorSet(E, K, phi, c), names)
