import pytest
from hypothesis import given, strategies as st

from gpdext import fixtures as F
from gpdext.errors import GroupoidError, NotNormalError
from gpdext.groupoid import (FiniteGroupoid, GroupBundle, GroupoidHom, action_groupoid, check_weak_equivalence,
                             discrete_groupoid, disjoint_union, full_subgroupoid, group_groupoid, isotropy,
                             kernel_subbundle, orbits, pair_groupoid, pullback_groupoid, quotient_by_bundle,
                             relabel, restrict_to_transversal, transitive_groupoid, validate_groupoid,
                             validate_hom)
from gpdext.groups import cyclic, dihedral, symmetric


def test_pair_groupoid_valid():
    P = pair_groupoid("abc")
    assert validate_groupoid(P) == []
    assert len(P.arrows) == 9
    assert orbits(P) == [("a", "b", "c")]


def test_non_associative_entry_is_named():
    m = {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("e", "b"): "b", ("b", "e"): "b",
         ("a", "a"): "e", ("b", "b"): "e", ("a", "b"): "a", ("b", "a"): "b"}
    G = FiniteGroupoid(["*"], {g: ("*", "*") for g in "eab"}, m, {"*": "e"})
    problems = validate_groupoid(G)
    assert problems and problems[0] == "associativity fails at (a,a,b)"


def test_missing_composite_reported():
    G = group_groupoid(cyclic(2))
    comp = dict(G.compose)
    del comp[("1", "1")]
    bad = FiniteGroupoid(G.objects, {a: ("*", "*") for a in G.arrows}, comp, G.units)
    assert any("missing" in p for p in validate_groupoid(bad))


def test_action_groupoid_orbits():
    # Z/4 acting on 0..3 by rotation through 2: two orbits
    G = action_groupoid(cyclic(4), range(4), lambda g, x: (int(x) + 2 * g) % 4)
    assert validate_groupoid(G) == []
    assert sorted(orbits(G)) == [("0", "2"), ("1", "3")]
    assert isotropy(G, "0").order == 2


@given(st.integers(1, 3), st.sampled_from([cyclic(1), cyclic(2), cyclic(3), symmetric(3)]))
def test_transitive_groupoid_is_valid(n, Q):
    G = transitive_groupoid([f"x{i}" for i in range(n)], Q)
    assert validate_groupoid(G) == []
    assert len(G.arrows) == n * n * Q.order
    for g in G.arrows:
        assert G.mul(g, G.inv(g)) == G.units[G.tgt[g]]


def test_disjoint_union_and_overlap():
    U = disjoint_union(group_groupoid(cyclic(2), "a"), discrete_groupoid(["b"]))
    assert validate_groupoid(U) == [] and len(orbits(U)) == 2
    with pytest.raises(GroupoidError):
        disjoint_union(group_groupoid(cyclic(2)), group_groupoid(cyclic(3)))


def test_relabel_keeps_structure():
    G = transitive_groupoid("ab", cyclic(2))
    H = relabel(G, {a: f"n{i}" for i, a in enumerate(G.arrows)})
    assert validate_groupoid(H) == []
    assert len(H.arrows) == len(G.arrows)


def test_transversal_inclusion_is_weak_equivalence():
    G = transitive_groupoid("abc", cyclic(2))
    r = restrict_to_transversal(G, ["b"])
    assert r.complete
    assert check_weak_equivalence(r.inclusion) == (True, None)
    two = disjoint_union(transitive_groupoid("ab", cyclic(1)), group_groupoid(cyclic(2), "c"))
    r = restrict_to_transversal(two, ["a"])
    assert not r.complete
    ok, why = check_weak_equivalence(r.inclusion)
    assert not ok and "c" in why


def test_pullback_along_surjection():
    G = group_groupoid(cyclic(3))
    P, hom = pullback_groupoid(G, {"p": "*", "q": "*", "r": "*"})
    assert validate_groupoid(P) == []
    assert validate_hom(hom) == []
    assert len(P.arrows) == 27
    assert check_weak_equivalence(hom) == (True, None)
    with pytest.raises(GroupoidError):
        pullback_groupoid(G, {"p": "nowhere"})


def test_quotient_by_centre():
    D = dihedral(8)
    G = group_groupoid(D)
    centre = [D.label(g) for g in D.center]
    E, pi = quotient_by_bundle(G, {"*": centre})
    assert validate_groupoid(E) == []
    assert len(E.arrows) == 4
    assert validate_hom(pi) == []
    assert sorted(kernel_subbundle(pi)["*"]) == sorted(centre)


def test_quotient_by_non_normal_subgroup_gives_witness():
    S = symmetric(3)
    G = group_groupoid(S)
    t = next(S.label(g) for g in S if S.element_order(g) == 2)
    with pytest.raises(NotNormalError) as err:
        quotient_by_bundle(G, {"*": [t]})
    g, k = err.value.witness
    assert k == t and G.chain(g, k, G.inv(g)) not in {t, G.units["*"]}


def test_full_subgroupoid_and_bundle():
    G = transitive_groupoid("abc", cyclic(2))
    H = full_subgroupoid(G, ["a", "c"])
    assert validate_groupoid(H) == [] and H.objects == ("a", "c")
    K = GroupBundle.constant("abc", cyclic(2))
    assert K.restrict(["a"]).base == ("a",) and K.is_abelian


def test_hom_validation_detects_bad_map():
    G = group_groupoid(cyclic(2))
    bad = GroupoidHom(G, G, {"*": "*"}, {"0": "1", "1": "1"})
    assert validate_hom(bad)


def test_fixture_bases_are_groupoids(abelian_fixture):
    _, ext = abelian_fixture
    assert validate_groupoid(ext.G) == [] and validate_groupoid(ext.E) == []
