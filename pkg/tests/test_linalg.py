import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gpdext import _snf_py, linalg
from gpdext.linalg import diagonalize, kernel_mod, quotient_mod, solve_mod

try:
    from gpdext._snf import diagonalize as compiled
except ImportError:
    compiled = None

moduli = st.sampled_from([2, 3, 4, 6, 8, 12])


@st.composite
def matrices(draw, max_dim=4):
    N = draw(moduli)
    m, n = draw(st.integers(1, max_dim)), draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(st.integers(0, N - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return np.array(rows, dtype=np.int64), N


def _check_diagonal(A, D):
    N = D.N
    U, V = D.U, D.V
    B = (U @ (A % N) @ V) % N
    expect = np.zeros_like(B)
    for i, d in enumerate(D.diag):
        expect[i, i] = d
    assert (B == expect).all()
    assert ((U @ D.Uinv) % N == np.eye(U.shape[0], dtype=np.int64)).all()
    assert ((V @ D.Vinv) % N == np.eye(V.shape[0], dtype=np.int64)).all()


@given(matrices(6))
def test_fallback_diagonalizes(case):
    A, N = case
    _check_diagonal(A, diagonalize(A, N, backend=_snf_py.diagonalize))


@pytest.mark.skipif(compiled is None, reason="compiled kernel not built")
@given(matrices(6))
def test_backends_agree(case):
    A, N = case
    Dp = diagonalize(A, N, backend=_snf_py.diagonalize)
    Dc = diagonalize(A, N, backend=compiled)
    _check_diagonal(A, Dc)
    assert Dp.diag == Dc.diag and Dp.rank == Dc.rank


def test_backend_name():
    assert linalg.BACKEND in ("compiled", "python")


@given(matrices(3))
def test_kernel_matches_enumeration(case):
    A, N = case
    gens, orders = kernel_mod(A, N)
    brute = {x for x in itertools.product(range(N), repeat=A.shape[1]) if not ((A @ np.array(x)) % N).any()}
    span = {tuple([0] * A.shape[1])}
    for j, o in enumerate(orders):
        col = gens[:, j]
        span = {tuple((np.array(s) + t * col) % N) for s in span for t in range(o)}
    assert span == brute


@given(matrices(3), st.data())
def test_solve_finds_solution_iff_one_exists(case, data):
    A, N = case
    b = np.array(data.draw(st.lists(st.integers(0, N - 1), min_size=A.shape[0], max_size=A.shape[0])))
    x = solve_mod(A, b, N)
    exists = any(((A @ np.array(v) - b) % N == 0).all() for v in itertools.product(range(N), repeat=A.shape[1]))
    assert (x is not None) == exists
    if x is not None:
        assert ((A @ x - b) % N == 0).all()


@given(matrices(3))
def test_quotient_size(case):
    A, N = case
    Q = quotient_mod(A, A.shape[0], N)
    vecs = list(itertools.product(range(N), repeat=A.shape[0]))
    span = {tuple([0] * A.shape[0])}
    for j in range(A.shape[1]):
        span = {tuple((np.array(s) + t * A[:, j]) % N) for s in span for t in range(N)}
    assert Q.size == len(vecs) // len(span)
    for v in vecs[:20]:
        w = (np.array(Q.lift(Q.coords(v))) - np.array(v)) % N
        assert tuple(w) in span


def test_empty_quotient():
    Q = quotient_mod(np.zeros((0, 0), dtype=np.int64), 0, 2)
    assert Q.size == 1 and Q.summands == []
