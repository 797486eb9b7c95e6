import pytest
from hypothesis import given, strategies as st

from gpdext.groupoid import GroupBundle
from gpdext.groups import FiniteGroup, cyclic, direct_product, symmetric
from gpdext.torsor import (abelian_product, adjoint_bundle, adjoint_to_structure, bitorsor_isomorphism,
                           classify_bitorsors, conjugation_by_section, division, expected_class_count,
                           invert_torsor, is_central, left_automorphism, pushforward, right_tensor, sections,
                           tensor, trivial_torsor, validate_bitorsor, with_automorphism)

ABELIAN = [cyclic(2), cyclic(3), cyclic(4), cyclic(5), direct_product(cyclic(2), cyclic(2))]


def bundle(G, base=("a", "b")):
    return GroupBundle.constant(base, G)


@st.composite
def automorphism_bitorsor(draw, groups=ABELIAN):
    G = draw(st.sampled_from(groups))
    K = bundle(G)
    sigma = {x: draw(st.sampled_from(G.automorphisms)) for x in K.base}
    return K, sigma, with_automorphism(K, sigma)


def compose(s, t):
    return tuple(s[t[k]] for k in range(len(t)))


def test_trivial_torsor_valid():
    for G in ABELIAN + [symmetric(3)]:
        P = trivial_torsor(bundle(G))
        assert validate_bitorsor(P) == []


@given(automorphism_bitorsor(ABELIAN + [symmetric(3)]))
def test_left_automorphism_recovers_sigma(data):
    K, sigma, P = data
    assert validate_bitorsor(P) == []
    for x in K.base:
        assert left_automorphism(P, x) == tuple(sigma[x])


@given(automorphism_bitorsor(), st.data())
def test_division_is_unique(data, draw):
    K, _, P = data
    x = "a"
    q = draw.draw(st.sampled_from(P.points[x]))
    p = draw.draw(st.sampled_from(P.points[x]))
    k = division(P, q, p)
    assert P.points[x][P.act_right(x, P.index(x, q), k)] == p
    assert [j for j in range(K[x].order) if P.act_right(x, P.index(x, q), j) == P.index(x, p)] == [k]


@given(automorphism_bitorsor(ABELIAN + [symmetric(3)]), automorphism_bitorsor(ABELIAN + [symmetric(3)]))
def test_tensor_composes_automorphisms(a, b):
    K, s, P = a
    K2, t, Q = b
    if K[("a")] != K2["a"]:
        return
    PQ = tensor(P, Q)
    assert validate_bitorsor(PQ) == []
    # l·(p⊗q) = p·σ(l)⊗q = p⊗σ(l)·q = p⊗q·τσ(l)
    expect = with_automorphism(K, {x: compose(t[x], s[x]) for x in K.base})
    assert bitorsor_isomorphism(PQ, expect) is not None


@given(automorphism_bitorsor())
def test_inverse_cancels(data):
    K, _, P = data
    inv = invert_torsor(P)
    assert validate_bitorsor(inv) == []
    assert bitorsor_isomorphism(tensor(P, inv), trivial_torsor(K)) is not None
    assert bitorsor_isomorphism(tensor(inv, P), trivial_torsor(K)) is not None


@given(automorphism_bitorsor(ABELIAN + [symmetric(3)]))
def test_adjoint_bundle_is_a_group_bundle(data):
    K, _, P = data
    Ad, quo = adjoint_bundle(P)
    for x in K.base:
        assert Ad[x].order == K[x].order
        assert Ad[x].isomorphism(K[x]) is not None


@given(automorphism_bitorsor())
def test_adjoint_identifies_with_structure_group_for_abelian_fibers(data):
    K, _, P = data
    Ad, quo = adjoint_bundle(P)
    iso = adjoint_to_structure(P, quo)
    for x in K.base:
        f = iso[x]
        assert sorted(f) == list(range(K[x].order))
        for a in range(Ad[x].order):
            for b in range(Ad[x].order):
                assert f[Ad[x].mul(a, b)] == K[x].mul(f[a], f[b])


def test_centrality_of_sections():
    S = symmetric(3)
    P = trivial_torsor(bundle(S, ("a",)))
    central = [s for s in sections(P) if is_central(P, s)]
    assert len(central) == len(S.center) == 1
    K = bundle(cyclic(4), ("a",))
    P = with_automorphism(K, {"a": (0, 3, 2, 1)})
    assert not any(is_central(P, s) for s in sections(P))
    for s in sections(P):
        assert conjugation_by_section(P, s)["a"] == (0, 3, 2, 1)


@pytest.mark.parametrize("G", ABELIAN)
def test_bitorsor_classes_match_automorphism_group(G):
    K = bundle(G, ("a",))
    cg = classify_bitorsors(K.base, K)
    assert cg.order == expected_class_count(K.base, K) == len(G.automorphisms)
    Bitor = cg.as_group()
    autos = list(G.automorphisms)
    idx = {a: i for i, a in enumerate(autos)}
    Aut = FiniteGroup([[idx[compose(a, b)] for b in autos] for a in autos])
    assert Bitor.isomorphism(Aut) is not None


def test_bitorsor_classes_on_two_points():
    K = bundle(cyclic(3))
    assert classify_bitorsors(K.base, K).order == 4


@given(automorphism_bitorsor(), automorphism_bitorsor())
def test_abelian_product_is_a_bitorsor(a, b):
    K, s, P = a
    K2, t, Q = b
    if K["a"] != K2["a"]:
        return
    ident = {x: tuple(range(K[x].order)) for x in K.base}
    R = abelian_product(P, s, Q, ident)
    assert validate_bitorsor(R) == []
    Pr = pushforward(P, ident)
    assert validate_bitorsor(right_tensor(Pr, Q)) == []
