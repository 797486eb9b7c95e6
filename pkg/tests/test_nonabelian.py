import random

import pytest

from gpdext import fixtures as F
from gpdext.classification import context_for, extension_to_cocycle, normalize_cocycle
from gpdext.embedding import build_embedding_category
from gpdext.errors import GuardExceeded
from gpdext.extension import extensions_isomorphic, validate_extension
from gpdext.nonabelian import (abelian_to_nonabelian, band_from_action, check_witness, cocycle_from_gerbe,
                               extension_band, extension_to_nonabelian, gerbe_from_extension, gerbe_problems,
                               is_normal, nonabelian_classes, nonabelian_cocycle_validate, nonabelian_equivalent,
                               nonabelian_to_extension, perturb, validate_band)

from helpers import singleton_basis


def s3_setup():
    ext = F.fixture("s3-times-z2")
    cat = build_embedding_category(ext.E, iso_closed=True)
    return ext, cat, extension_to_nonabelian(ext, cat)


def random_change(c, rng):
    band, cat = c.band, c.cat
    mu = {U: rng.choice(band.group_at(U).elements) for U in cat.objects}
    # a relative change is trivial on the unit sections
    f = {s: band.group_at(s.dom).identity if s in cat.units else rng.choice(band.group_at(s.dom).elements)
         for s in cat.arrows}
    return mu, f


def test_extension_cocycle_is_valid():
    ext, cat, c = s3_setup()
    assert nonabelian_cocycle_validate(c).ok
    assert validate_band(c.band) == []
    assert is_normal(c)


def test_nonabelian_roundtrip():
    ext, _, c = s3_setup()
    back = nonabelian_to_extension(c)
    assert validate_extension(back) == []
    assert extensions_isomorphic(ext, back) is not None


def test_single_class_for_s3():
    ext, cat, c = s3_setup()
    classes = nonabelian_classes(extension_band(ext, cat))
    assert len(classes) == 1
    w = nonabelian_equivalent(c, classes[0])
    assert w is not None and check_witness(c, classes[0], w)


@pytest.mark.parametrize("seed", range(5))
def test_perturbation_is_equivalent(seed):
    _, _, c = s3_setup()
    rng = random.Random(seed)
    mu, f = random_change(c, rng)
    c2 = perturb(c, mu, f)
    assert nonabelian_cocycle_validate(c2).ok
    w = nonabelian_equivalent(c, c2)
    assert w is not None and check_witness(c, c2, w)


def test_broken_cocycle_reported():
    _, cat, c = s3_setup()
    key = next(k for k in sorted(c.xi) if k[0] not in cat.units)
    V = c.band.group_at(key[1].dom)
    bad = dict(c.xi)
    bad[key] = next(v for v in V.elements if v != c.xi[key])
    rep = nonabelian_cocycle_validate(type(c)(c.band, c.R, bad))
    assert not rep.ok and rep.first_bad_triple is not None


def test_gerbe_route_agrees():
    ext, cat, c = s3_setup()
    g = gerbe_from_extension(ext, cat)
    assert gerbe_problems(g) == []
    c2 = cocycle_from_gerbe(g)
    assert nonabelian_cocycle_validate(c2).ok
    assert nonabelian_equivalent(c, c2) is not None


def test_equivalence_guard():
    _, _, c = s3_setup()
    with pytest.raises(GuardExceeded):
        nonabelian_equivalent(c, c, guard=1)


@pytest.mark.parametrize("name", sorted(F.ABELIAN_FIXTURES))
def test_abelian_equivalence_matches_linear_test(name):
    ext = F.fixture(name)
    # the default basis on two objects is past the search guard
    ctx = context_for(ext, basis=singleton_basis(ext) if len(ext.objects) > 1 else None)
    xi = extension_to_cocycle(ext, ctx.cat)
    target = ctx.class_of(xi)
    c = abelian_to_nonabelian(xi)
    for coords, v in ctx.H2.representatives():
        rep, _ = normalize_cocycle(ctx.cocycle(v))
        w = nonabelian_equivalent(c, abelian_to_nonabelian(rep))
        assert (w is not None) == (coords == target)


@pytest.mark.parametrize("name", ["split-z2", "split-z3", "s3-over-z2", "z4-pair"])
def test_abelian_band_class_count(name):
    ext = F.fixture(name)
    ctx = context_for(ext, basis=singleton_basis(ext))
    band = band_from_action(ctx.cat, ext.K, ctx.action.table)
    assert len(nonabelian_classes(band)) == ctx.H2.order


def test_default_pair_basis_hits_guard():
    ext = F.fixture("z4-pair")
    ctx = context_for(ext)
    c = abelian_to_nonabelian(extension_to_cocycle(ext, ctx.cat))
    with pytest.raises(GuardExceeded):
        nonabelian_equivalent(c, c)
