import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpdext import fixtures as F
from gpdext.classification import pullback_coefficients, relative_h2
from gpdext.cohomology import (CategoryComplex, SmallCategory, check_presheaf, coboundary, complex_cohomology,
                               constant_presheaf, describe, direct_sum_presheaf, enumerate_cohomology, les_check,
                               relative_cohomology, validate_category)
from gpdext.embedding import (EmbeddingCategory, build_embedding_category, check_approximating,
                              sections_presheaf)
from gpdext.errors import GroupoidError
from gpdext.extension import induced_action
from gpdext.groupoid import pullback_groupoid
from gpdext.obstruction import nerve_complex

SMALL = ["split-z2", "z4-over-z2", "split-z3", "s3-over-z2", "split-inversion", "two-orbit", "z4-pair"]


def complex_for(name, relative=False, basis=None):
    ext = F.fixture(name)
    if basis is None and len(ext.objects) > 1:
        basis = [(x,) for x in ext.objects]
    cat = build_embedding_category(ext.E, basis, iso_closed=True)
    A = sections_presheaf(cat, ext.K, induced_action(ext).table)
    return cat, A, CategoryComplex(cat, A, relative_to=cat.units if relative else None)


def test_embedding_categories_are_categories(abelian_fixture):
    _, ext = abelian_fixture
    cat = build_embedding_category(ext.E, [(x,) for x in ext.objects], iso_closed=True)
    assert validate_category(cat) == []
    assert check_presheaf(cat, sections_presheaf(cat, ext.K, induced_action(ext).table)) == []
    assert check_approximating(cat, ext.E) == (True, None)


def test_default_basis_on_pair():
    ext = F.fixture("z4-pair")
    cat = build_embedding_category(ext.E, iso_closed=True)
    assert set(cat.objects) == {("a",), ("b",), ("a", "b")}
    assert validate_category(cat) == []


def test_approximating_detects_missing_arrow():
    ext = F.fixture("z4-over-z2")
    cat = build_embedding_category(ext.E)
    E = ext.E
    drop = next(a for a in cat.arrows if not E.is_unit(a.values[0]))
    keep = [a for a in cat.arrows if a != drop]
    sub = EmbeddingCategory(E, cat.basis, keep, [a for a in cat.units])
    ok, why = check_approximating(sub, E)
    assert not ok and "not covered" in why


def test_basis_must_hold_singletons():
    ext = F.fixture("z4-pair")
    with pytest.raises(GroupoidError):
        build_embedding_category(ext.E, [("a", "b")])


@settings(max_examples=60)
@given(st.sampled_from(SMALL), st.integers(0, 2), st.booleans(), st.data())
def test_d_squared_vanishes(name, n, relative, data):
    _, _, cx = complex_for(name, relative)
    mods = cx.group(n)
    v = np.array([data.draw(st.integers(0, m - 1)) for m in mods], dtype=np.int64)
    w = cx.d(n + 1) @ (cx.d(n) @ v)
    assert all(int(a) % m == 0 for a, m in zip(w, cx.group(n + 2)))


@settings(max_examples=30)
@given(st.sampled_from(["split-z2", "split-inversion", "two-orbit"]), st.integers(1, 3), st.data())
def test_face_sum_matches_matrix(name, n, data):
    cat, A, cx = complex_for(name)
    mods = cx.group(n - 1)
    v = np.array([data.draw(st.integers(0, m - 1)) for m in mods], dtype=np.int64)
    c = cx.to_cochain(n - 1, v)
    dc = coboundary(cat, A, c, n)
    assert cx.to_vector(n, dc).tolist() == ((cx.d(n - 1) @ v) % np.array(cx.group(n))).tolist()


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("relative", [False, True])
@pytest.mark.parametrize("n", [1, 2])
def test_snf_agrees_with_enumeration(name, relative, n):
    _, _, cx = complex_for(name, relative)
    H = complex_cohomology(cx, n)
    if math.prod(cx.group(n)) > 2 ** 18:
        pytest.skip("cochain group too large to enumerate")
    En = enumerate_cohomology(cx, n)
    assert En.order == H.order
    assert En.invariants == H.invariants


@pytest.mark.parametrize("name", SMALL)
def test_classes_and_witnesses(name):
    _, _, cx = complex_for(name, relative=True)
    H = complex_cohomology(cx, 2)
    for coords, rep in H.representatives():
        assert H.is_cocycle(rep)
        assert H.class_of(rep) == coords
        assert (H.coboundary_witness(rep) is None) == any(coords)
    rng = np.random.default_rng(0)
    prev = cx.group(1)
    for _ in range(5):
        y = np.array([rng.integers(0, m) for m in prev], dtype=np.int64)
        x = (cx.d(1) @ y) % np.array(cx.group(2))
        assert not any(H.class_of(x))
        w = H.coboundary_witness(x)
        assert w is not None and ((cx.d(1) @ w - x) % np.array(cx.group(2)) == 0).all()


@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 3), (4, 2), (4, 4), (3, 4)])
def test_relative_h2_of_cyclic_group(n, m):
    ext = F.split(n, m)
    cat = build_embedding_category(ext.E, iso_closed=True)
    A = sections_presheaf(cat, ext.K, induced_action(ext).table)
    assert relative_cohomology(cat, cat.units, A, 2).order == math.gcd(n, m)


def test_direct_sum_multiplies_orders():
    ext = F.fixture("split-z2")
    cat = build_embedding_category(ext.E, iso_closed=True)
    A = sections_presheaf(cat, ext.K, induced_action(ext).table)
    B = constant_presheaf(cat, [3])
    S = direct_sum_presheaf(A, B)
    assert check_presheaf(cat, S) == []
    for n in range(3):
        hA = complex_cohomology(CategoryComplex(cat, A), n).order
        hB = complex_cohomology(CategoryComplex(cat, B), n).order
        assert complex_cohomology(CategoryComplex(cat, S), n).order == hA * hB


def test_nerve_of_boundary_of_tetrahedron():
    cover = [[j for j in range(4) if j != i] for i in range(4)]
    cx = nerve_complex(cover, [2])
    assert [describe(complex_cohomology(cx, n).invariants) for n in range(4)] == ["Z/2", "0", "Z/2", "0"]


def test_category_of_two_parallel_arrows():
    # the Kronecker quiver with constant Z/2 has H^1 = Z/2
    cat = SmallCategory(["s", "t"], ["1s", "1t", "f", "g"], {"1s": "s", "1t": "t", "f": "s", "g": "s"},
                        {"1s": "s", "1t": "t", "f": "t", "g": "t"},
                        {("1s", "1s"): "1s", ("1t", "1t"): "1t", ("f", "1s"): "f", ("g", "1s"): "g",
                         ("1t", "f"): "f", ("1t", "g"): "g"}, {"s": "1s", "t": "1t"})
    assert validate_category(cat) == []
    A = constant_presheaf(cat, [2])
    assert complex_cohomology(CategoryComplex(cat, A), 1).order == 2
    assert complex_cohomology(CategoryComplex(cat, A), 2).order == 1


@pytest.mark.parametrize("name", ["split-z2", "s3-over-z2", "two-orbit"])
def test_long_exact_sequence(name):
    cat, A, _ = complex_for(name)
    rep = les_check(cat, cat.units, A, 2)
    assert rep.ok, rep.failures


@pytest.mark.parametrize("name,along,basis", [
    ("z4-over-z2", {"p": "*", "q": "*"}, None),
    ("split-inversion", {"u": "*", "v": "*"}, None),
    ("two-orbit", {"a1": "a", "a2": "a", "b": "b"}, "singletons"),
])
def test_relative_h2_invariant_under_pullback(name, along, basis):
    ext = F.fixture(name)
    mu = induced_action(ext)
    P, hom = pullback_groupoid(ext.E, along)
    K2, mu2 = pullback_coefficients(hom, ext.K, mu)
    b = [(x,) for x in P.objects] if basis else None
    b0 = [(x,) for x in ext.objects] if basis else None
    assert relative_h2(P, K2, mu2, b) == relative_h2(ext.E, ext.K, mu, b0)
