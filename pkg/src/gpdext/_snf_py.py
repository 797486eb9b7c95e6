"""Numpy fallback for the diagonalization kernel in ``_snf.pyx``.

Both implementations perform the same sequence of elementary operations, so
they return identical matrices.
"""
import numpy as np


def diagonalize(A, N, U=None, Uinv=None, V=None, Vinv=None):
    """Reduce ``A`` (int64, entries in [0, N)) to diagonal form mod N in place.

    Row operations are mirrored on U (and inversely on Uinv), column operations
    on V (and Vinv), so that U @ A0 @ V == A mod N at the end. Returns the rank.
    """
    m, n = A.shape
    k = 0
    while k < min(m, n):
        sub = A[k:, k:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        vals = sub[nz]
        t = int(np.argmin(vals))  # first minimum in row-major order
        _swap_rows(A, U, Uinv, k, k + int(nz[0][t]))
        _swap_cols(A, V, Vinv, k, k + int(nz[1][t]))
        while True:
            p = A[k, k]
            q = A[k + 1:, k] // p
            if q.any():
                A[k + 1:, :] = (A[k + 1:, :] - np.outer(q, A[k, :])) % N
                if U is not None:
                    U[k + 1:, :] = (U[k + 1:, :] - np.outer(q, U[k, :])) % N
                    Uinv[:, k] = (Uinv[:, k] + Uinv[:, k + 1:] @ q) % N
            q = A[k, k + 1:] // p
            if q.any():
                A[:, k + 1:] = (A[:, k + 1:] - np.outer(A[:, k], q)) % N
                if V is not None:
                    V[:, k + 1:] = (V[:, k + 1:] - np.outer(V[:, k], q)) % N
                    Vinv[k, :] = (Vinv[k, :] + q @ Vinv[k + 1:, :]) % N
            col = A[k + 1:, k]
            row = A[k, k + 1:]
            best, where = 0, None
            for i in np.nonzero(col)[0]:
                if best == 0 or col[i] < best:
                    best, where = col[i], ("r", k + 1 + int(i))
            for j in np.nonzero(row)[0]:
                if best == 0 or row[j] < best:
                    best, where = row[j], ("c", k + 1 + int(j))
            if where is None:
                break
            if where[0] == "r":
                _swap_rows(A, U, Uinv, k, where[1])
            else:
                _swap_cols(A, V, Vinv, k, where[1])
        k += 1
    return k


def _swap_rows(A, U, Uinv, a, b):
    if a == b:
        return
    A[[a, b], :] = A[[b, a], :]
    if U is not None:
        U[[a, b], :] = U[[b, a], :]
        Uinv[:, [a, b]] = Uinv[:, [b, a]]


def _swap_cols(A, V, Vinv, a, b):
    if a == b:
        return
    A[:, [a, b]] = A[:, [b, a]]
    if V is not None:
        V[:, [a, b]] = V[:, [b, a]]
        Vinv[[a, b], :] = Vinv[[b, a], :]
