# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled diagonalization mod N; mirrors ``_snf_py.diagonalize`` operation for operation."""

ctypedef long long i64


cdef inline i64 _mod(i64 a, i64 N) nogil:
    a = a % N
    if a < 0:
        a += N
    return a


cdef void _swap_rows(i64[:, ::1] A, i64 a, i64 b) nogil:
    cdef Py_ssize_t j
    cdef i64 t
    for j in range(A.shape[1]):
        t = A[a, j]
        A[a, j] = A[b, j]
        A[b, j] = t


cdef void _swap_cols(i64[:, ::1] A, i64 a, i64 b) nogil:
    cdef Py_ssize_t i
    cdef i64 t
    for i in range(A.shape[0]):
        t = A[i, a]
        A[i, a] = A[i, b]
        A[i, b] = t


def diagonalize(i64[:, ::1] A, i64 N, i64[:, ::1] U=None, i64[:, ::1] Uinv=None,
                i64[:, ::1] V=None, i64[:, ::1] Vinv=None):
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t k = 0, i, j, c, bi, bj
    cdef i64 p, q, best
    cdef bint track_u = U is not None
    cdef bint track_v = V is not None
    cdef int kind
    cdef Py_ssize_t mu = U.shape[0] if track_u else 0
    cdef Py_ssize_t nv = V.shape[0] if track_v else 0
    with nogil:
        while k < m and k < n:
            best = 0
            bi = -1
            bj = -1
            for i in range(k, m):
                for j in range(k, n):
                    if A[i, j] != 0 and (best == 0 or A[i, j] < best):
                        best = A[i, j]
                        bi = i
                        bj = j
            if best == 0:
                break
            if bi != k:
                _swap_rows(A, k, bi)
                if track_u:
                    _swap_rows(U, k, bi)
                    _swap_cols(Uinv, k, bi)
            if bj != k:
                _swap_cols(A, k, bj)
                if track_v:
                    _swap_cols(V, k, bj)
                    _swap_rows(Vinv, k, bj)
            while True:
                p = A[k, k]
                for i in range(k + 1, m):
                    q = A[i, k] // p
                    if q == 0:
                        continue
                    for c in range(n):
                        A[i, c] = _mod(A[i, c] - q * A[k, c], N)
                    if track_u:
                        for c in range(mu):
                            U[i, c] = _mod(U[i, c] - q * U[k, c], N)
                        for c in range(mu):
                            Uinv[c, k] = _mod(Uinv[c, k] + q * Uinv[c, i], N)
                for j in range(k + 1, n):
                    q = A[k, j] // p
                    if q == 0:
                        continue
                    for c in range(m):
                        A[c, j] = _mod(A[c, j] - q * A[c, k], N)
                    if track_v:
                        for c in range(nv):
                            V[c, j] = _mod(V[c, j] - q * V[c, k], N)
                        for c in range(nv):
                            Vinv[k, c] = _mod(Vinv[k, c] + q * Vinv[j, c], N)
                best = 0
                kind = 0
                bi = -1
                for i in range(k + 1, m):
                    if A[i, k] != 0 and (best == 0 or A[i, k] < best):
                        best = A[i, k]
                        kind = 1
                        bi = i
                for j in range(k + 1, n):
                    if A[k, j] != 0 and (best == 0 or A[k, j] < best):
                        best = A[k, j]
                        kind = 2
                        bi = j
                if kind == 0:
                    break
                if kind == 1:
                    _swap_rows(A, k, bi)
                    if track_u:
                        _swap_rows(U, k, bi)
                        _swap_cols(Uinv, k, bi)
                else:
                    _swap_cols(A, k, bi)
                    if track_v:
                        _swap_cols(V, k, bi)
                        _swap_rows(Vinv, k, bi)
            k += 1
    return k
