import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpdext import fixtures as F
from gpdext.classification import (canonical_liftings, cocycle_to_extension, cocycle_violations,
                                   cocycles_cohomologous, context_for, extension_to_cocycle,
                                   isomorphism_between_cohomologous, lifting_change, coboundary_of, add_cochains,
                                   normalization_identities, normalize_cocycle, pi0_extension_classes,
                                   roundtrip_cocycle, roundtrip_extension)
from gpdext.errors import NotNormalError
from gpdext.extension import (baer_sum, extensions_isomorphic, induced_action, opposite_extension,
                              semidirect_unit, validate_morphism)
from gpdext.oracles import random_schreier_extension

from helpers import rename_extension, singleton_basis


def ctx_for(ext):
    return context_for(ext, basis=singleton_basis(ext) if len(ext.objects) > 2 else None)


def random_liftings(ext, cat, rng):
    out = {}
    for s in cat.arrows:
        if s in cat.units:
            out[s] = tuple(ext.G.units[x] for x in s.dom)
        else:
            out[s] = tuple(rng.choice(sorted(ext.fibers[e])) for e in s.values)
    return out


def add_classes(a, b, invariants):
    return tuple((x + y) % m for x, y, m in zip(a, b, invariants))


def test_extension_roundtrip(abelian_fixture):
    _, ext = abelian_fixture
    rep = roundtrip_extension(ext, ctx_for(ext).cat)
    assert rep.ok, rep.failures


@pytest.mark.parametrize("seed", range(3))
def test_renamed_extension_roundtrip(seed):
    ext = rename_extension(F.fixture("s3-over-z2"), seed)
    assert roundtrip_extension(ext).ok


def test_cocycle_roundtrip_on_representatives(abelian_fixture):
    _, ext = abelian_fixture
    ctx = ctx_for(ext)
    for _, v in ctx.H2.representatives():
        xi, _ = normalize_cocycle(ctx.cocycle(v))
        assert xi.normal and cocycle_violations(xi) == []
        assert normalization_identities(xi) == []
        rep = roundtrip_cocycle(xi)
        assert rep.ok, rep.failures


def test_non_normal_cocycle_rejected():
    ext = F.fixture("z4-pair")
    ctx = ctx_for(ext)
    cat = ctx.cat
    xi = extension_to_cocycle(ext, cat)
    rng = random.Random(0)
    shift = {s: tuple(ext.K[x].identity if s in cat.units else rng.randrange(ext.K[x].order) for x in s.dom)
             for s in cat.arrows}
    moved = add_cochains(ext.K, xi.values, coboundary_of(cat, ext.K, xi.action, shift), cat)
    bumped = type(xi)(cat, ext.K, xi.action, moved)
    assert cocycle_violations(bumped) == []
    assert ctx.class_of(bumped) == ctx.class_of(xi)
    with pytest.raises(NotNormalError):
        cocycle_to_extension(bumped)


@pytest.mark.parametrize("name", ["z4-over-z2", "s3-over-z2", "split-inversion", "z4-pair", "two-orbit"])
@pytest.mark.parametrize("seed", range(3))
def test_lifting_change_is_a_coboundary(name, seed):
    ext = F.fixture(name)
    ctx = ctx_for(ext)
    cat = ctx.cat
    rng = random.Random(seed)
    tilde, bar = random_liftings(ext, cat, rng), random_liftings(ext, cat, rng)
    xi_t = extension_to_cocycle(ext, cat, tilde)
    xi_b = extension_to_cocycle(ext, cat, bar)
    assert cocycle_violations(xi_t) == [] and cocycle_violations(xi_b) == []
    f = lifting_change(ext, cat, tilde, bar)
    # ξ_bar = ξ_tilde + d f
    assert add_cochains(ext.K, xi_t.values, coboundary_of(cat, ext.K, xi_t.action, f), cat) == xi_b.values
    assert ctx.class_of(xi_t) == ctx.class_of(xi_b)
    assert cocycles_cohomologous(ctx, xi_t, xi_b) is not None


@pytest.mark.parametrize("name", ["z4-over-z2", "split-z3", "s3-over-z2"])
def test_cohomologous_cocycles_give_isomorphic_extensions(name):
    ext = F.fixture(name)
    ctx = ctx_for(ext)
    cat = ctx.cat
    xi = extension_to_cocycle(ext, cat)
    rng = random.Random(3)
    g = {s: tuple(rng.randrange(ext.K[x].order) for x in s.dom) if s not in cat.units else
         tuple(ext.K[x].identity for x in s.dom) for s in cat.arrows}
    # keep g normalized on unit sections so the shifted cocycle stays normal
    zeta = type(xi)(cat, ext.K, xi.action, add_cochains(ext.K, xi.values, coboundary_of(cat, ext.K, xi.action, g), cat))
    zeta.normal = True
    assert cocycle_violations(zeta) == []
    w = cocycles_cohomologous(ctx, xi, zeta)
    assert w is not None
    phi = isomorphism_between_cohomologous(cocycle_to_extension(xi), cocycle_to_extension(zeta), g)
    assert validate_morphism(phi) == []


def test_distinct_classes_not_cohomologous():
    ext = F.split(2, 2)
    ctx = ctx_for(ext)
    reps = [ctx.cocycle(v) for _, v in ctx.H2.representatives()]
    assert len(reps) == 2
    assert cocycles_cohomologous(ctx, reps[0], reps[1]) is None


@pytest.mark.parametrize("name,count", [("split-z2", 2), ("split-z3", 3), ("s3-over-z2", 1), ("z4-pair", 2),
                                        ("two-orbit", 4)])
def test_pi0_classes(name, count):
    ext = F.fixture(name)
    mu = induced_action(ext)
    basis = singleton_basis(ext) if len(ext.objects) > 2 else None
    classes = pi0_extension_classes(ext.E, ext.K, mu, basis)
    assert len(classes) == count
    for i, A in enumerate(classes):
        for B in classes[i + 1:]:
            assert extensions_isomorphic(A, B) is None
    assert sum(extensions_isomorphic(ext, A) is not None for A in classes) == 1


@pytest.mark.parametrize("name", ["split-z2", "z4-over-z2", "z9-over-z3", "s3-over-z2", "z4-pair"])
def test_baer_sum_adds_classes(name):
    ext = F.fixture(name)
    ctx = ctx_for(ext)
    inv = ctx.H2.invariants
    mu = induced_action(ext)
    others = pi0_extension_classes(ext.E, ext.K, mu, ctx.cat.basis)
    c1 = ctx.class_of(extension_to_cocycle(ext, ctx.cat))
    for other in others:
        c2 = ctx.class_of(extension_to_cocycle(other, ctx.cat))
        s = baer_sum(ext, other).extension
        assert ctx.class_of(extension_to_cocycle(s, ctx.cat)) == add_classes(c1, c2, inv)
    unit = semidirect_unit(ext.K, ext.E, mu)
    assert not any(ctx.class_of(extension_to_cocycle(unit, ctx.cat)))
    op = ctx.class_of(extension_to_cocycle(opposite_extension(ext), ctx.cat))
    assert add_classes(c1, op, inv) == tuple(0 for _ in inv)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_random_schreier_roundtrip(seed):
    E, K, mu = F.random_abelian_data(seed, max_k=4)
    ext = random_schreier_extension(E, K, mu.table, seed)
    cat = context_for(ext, basis=singleton_basis(ext)).cat
    assert roundtrip_extension(ext, cat).ok
