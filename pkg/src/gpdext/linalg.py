"""Linear algebra over Z/N built on a diagonalization kernel.

The compiled kernel is used when it imports; set ``GPDEXT_PURE=1`` to force
the numpy fallback. ``BACKEND`` names whichever is active.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _snf_py

if os.environ.get("GPDEXT_PURE") == "1":
    _diag = _snf_py.diagonalize
    BACKEND = "python"
else:
    try:
        from ._snf import diagonalize as _diag
        BACKEND = "compiled"
    except ImportError:
        _diag = _snf_py.diagonalize
        BACKEND = "python"


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = out * int(v) // math.gcd(out, int(v))
    return out


@dataclass
class Diagonal:
    """U @ A @ V == diag(d) (mod N), with U, V invertible mod N."""
    N: int
    diag: list[int]
    rank: int
    U: np.ndarray | None
    Uinv: np.ndarray | None
    V: np.ndarray | None
    Vinv: np.ndarray | None
    shape: tuple[int, int]


def diagonalize(A, N: int, left: bool = True, right: bool = True, backend=None) -> Diagonal:
    A = np.ascontiguousarray(np.asarray(A, dtype=np.int64) % N)
    m, n = A.shape
    U = np.eye(m, dtype=np.int64) if left else None
    Uinv = np.eye(m, dtype=np.int64) if left else None
    V = np.eye(n, dtype=np.int64) if right else None
    Vinv = np.eye(n, dtype=np.int64) if right else None
    fn = backend or _diag
    if N == 1:
        r = 0
    else:
        r = fn(A, N, U, Uinv, V, Vinv)
    return Diagonal(N, [int(A[i, i]) for i in range(r)], r, U, Uinv, V, Vinv, (m, n))


def kernel_mod(A, N: int) -> tuple[np.ndarray, list[int]]:
    """Generators (columns) of {x : A x = 0 mod N} and the additive order of each."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    D = diagonalize(A, N, left=False)
    scale = []
    for i in range(n):
        if i < D.rank:
            scale.append(N // math.gcd(D.diag[i], N))
        else:
            scale.append(1)
    gens = (D.V * np.array(scale, dtype=np.int64)) % N
    orders = [N // s for s in scale]
    keep = [i for i in range(n) if orders[i] > 1]
    return gens[:, keep], [orders[i] for i in keep]


def solve_mod(A, b, N: int) -> np.ndarray | None:
    """Some x with A x = b mod N, or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64) % N
    m, n = A.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    D = diagonalize(A, N)
    c = (D.U @ b) % N
    y = np.zeros(n, dtype=np.int64)
    for i in range(m):
        if i < D.rank:
            d = D.diag[i]
            g = math.gcd(d, N)
            if c[i] % g:
                return None
            mod = N // g
            y[i] = (c[i] // g) * pow(d // g, -1, mod) % mod if mod > 1 else 0
        elif c[i] % N:
            return None
    return (D.V @ y) % N


def solve_mod_rows(A, b, moduli) -> np.ndarray | None:
    """Solve A x = b where row r is read modulo ``moduli[r]``; x is returned mod lcm."""
    moduli = [int(m) for m in moduli]
    N = lcm_all(moduli + [1])
    scale = np.array([N // m for m in moduli], dtype=np.int64)
    A = (np.asarray(A, dtype=np.int64) * scale[:, None]) % N
    b = (np.asarray(b, dtype=np.int64) * scale) % N
    return solve_mod(A, b, N)


@dataclass
class Quotient:
    """(Z/N)^r modulo the column span of a relation matrix, in diagonal coordinates.

    ``orders[j]`` is the order of the j-th cyclic summand (1 for trivial ones,
    which are dropped from ``summands``).
    """
    N: int
    orders: list[int]
    U: np.ndarray
    Uinv: np.ndarray

    @property
    def summands(self) -> list[int]:
        return [o for o in self.orders if o > 1]

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def coords(self, w) -> tuple[int, ...]:
        """Coordinates of the class of w in the nontrivial summands."""
        c = (self.U @ (np.asarray(w, dtype=np.int64) % self.N)) % self.N
        return tuple(int(c[j]) % o for j, o in enumerate(self.orders) if o > 1)

    def lift(self, coords) -> np.ndarray:
        full = np.zeros(len(self.orders), dtype=np.int64)
        it = iter(coords)
        for j, o in enumerate(self.orders):
            if o > 1:
                full[j] = next(it) % o
        return (self.Uinv @ full) % self.N


def quotient_mod(relations, r: int, N: int) -> Quotient:
    """Quotient of (Z/N)^r by the column span of ``relations`` (r x g)."""
    R = np.asarray(relations, dtype=np.int64)
    R = R.reshape(r, -1) if r else np.zeros((0, 0), dtype=np.int64)
    D = diagonalize(R, N, right=False)
    orders = []
    for j in range(r):
        orders.append(math.gcd(D.diag[j], N) if j < D.rank else N)
    return Quotient(N, orders, D.U, D.Uinv)
