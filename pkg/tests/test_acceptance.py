"""The eight acceptance criteria, one test each, each printing a PASS/FAIL line."""
import math
import random
import time

import numpy as np
import pytest

from gpdext import fixtures as F
from gpdext.classification import (cocycle_to_extension, context_for, extension_to_cocycle, normalize_cocycle, pullback_coefficients,
                                   relative_h2, roundtrip_cocycle, roundtrip_extension)
from gpdext.cohomology import CategoryComplex, complex_cohomology, enumerate_cohomology, les_check
from gpdext.embedding import build_embedding_category, sections_presheaf
from gpdext.extension import (baer_sum, check_connecting, connecting_bitorsor, extensions_isomorphic,
                              induced_action, lift_action, opposite_extension, recover_section, section_isomorphism,
                              semidirect_unit, trivial_action, validate_morphism)
from gpdext.groupoid import pullback_groupoid
from gpdext.nonabelian import (abelian_to_nonabelian, check_witness, extension_band, extension_to_nonabelian,
                               nonabelian_classes, nonabelian_equivalent, nonabelian_to_extension)
from gpdext.obstruction import build_cover_data, lifting_search_size, nerve_complex, obstruct
from gpdext.oracles import action_phi_choices, band_phi_choices, enumerate_extensions, random_schreier_extension
from gpdext.torsor import sections

from helpers import rename_extension, singleton_basis


def report(capsys, number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"\nACCEPTANCE {number} {title}: {status} {detail}".rstrip())
        for f in failures[:5]:
            print(f"    {f}")
    assert not failures, failures


def basis_for(ext):
    return singleton_basis(ext) if len(ext.objects) > 1 else None


def add(a, b, orders):
    return tuple((x + y) % m for x, y, m in zip(a, b, orders))


def test_classification_counts(capsys):
    start = time.perf_counter()
    failures = []
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            ext = F.split(n, m)
            mu = trivial_action(ext.E, ext.K)
            by_snf = math.prod(relative_h2(ext.E, ext.K, mu))
            ctx = context_for(ext.E, ext.K, mu)
            by_enum = enumerate_cohomology(ctx.complex, 2).order
            by_ext = len(enumerate_extensions(ext.E, ext.K, action_phi_choices(ext.E, mu.table)).classes)
            if not by_snf == by_enum == by_ext == math.gcd(n, m):
                failures.append(f"n={n} m={m}: snf {by_snf}, enumeration {by_enum}, extensions {by_ext}")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s")
    report(capsys, 1, "classification counts", failures, f"({elapsed:.1f}s, 9 cases)")


def test_round_trip(capsys):
    failures = []
    cases = [(name, F.fixture(name)) for name in sorted(F.ABELIAN_FIXTURES)]
    for seed in range(100):
        E, K, mu = F.random_abelian_data(seed)
        cases.append((f"random {seed}", random_schreier_extension(E, K, mu.table, seed)))
    for label, ext in cases:
        ctx = context_for(ext, basis=basis_for(ext))
        rep = roundtrip_extension(ext, ctx.cat)
        if not rep.ok:
            failures.append(f"{label}: ext->cocycle->ext {rep.failures[:1]}")
        xi = extension_to_cocycle(ext, ctx.cat)
        for coords, v in [(None, None)] + ctx.H2.representatives():
            zeta = xi if v is None else normalize_cocycle(ctx.cocycle(v))[0]
            if not roundtrip_cocycle(zeta).ok:
                failures.append(f"{label}: cocycle->ext->cocycle at class {coords}")
    # the non-abelian fixture goes through (R, ξ)
    ext = F.fixture("s3-times-z2")
    cat = build_embedding_category(ext.E, iso_closed=True)
    if extensions_isomorphic(ext, nonabelian_to_extension(extension_to_nonabelian(ext, cat))) is None:
        failures.append("s3-times-z2: ext->(R,ξ)->ext not isomorphic")
    report(capsys, 2, "round trip", failures, f"({len(cases) + 1} extensions)")


def test_baer_sum(capsys):
    failures = []
    checked = 0
    for name in sorted(F.ABELIAN_FIXTURES):
        ext = F.fixture(name)
        ctx = context_for(ext, basis=basis_for(ext))
        orders = ctx.H2.invariants
        mu = induced_action(ext)
        c1 = ctx.class_of(extension_to_cocycle(ext, ctx.cat))
        for coords, v in ctx.H2.representatives():
            other = cocycle_to_extension(normalize_cocycle(ctx.cocycle(v))[0]).extension
            total = baer_sum(ext, other).extension
            got = ctx.class_of(extension_to_cocycle(total, ctx.cat))
            checked += 1
            if got != add(c1, coords, orders):
                failures.append(f"{name}: {c1} + {coords} gave {got}")
        unit = semidirect_unit(ext.K, ext.E, mu)
        iso = extensions_isomorphic(baer_sum(ext, unit).extension, ext)
        if iso is None or validate_morphism(iso):
            failures.append(f"{name}: unit law")
        iso = extensions_isomorphic(baer_sum(ext, opposite_extension(ext)).extension, unit)
        if iso is None or validate_morphism(iso):
            failures.append(f"{name}: inverse law")
    report(capsys, 3, "Baer sum", failures, f"({checked} sums, {len(F.ABELIAN_FIXTURES)} fixtures)")


def test_obstruction_equivalence(capsys):
    failures = []
    counts = {"vanishing": 0, "obstructed": 0, "skipped": 0}
    for seed in range(150):
        for tetrahedron in (False, True):
            E, T, B, cover, choices = F.random_obstruction_instance(seed, tetrahedron)
            cd = build_cover_data(E, T, cover, choices)
            if lifting_search_size(B, cd) > 10 ** 8:
                counts["skipped"] += 1
                continue
            rep = obstruct(B, cd)
            label = f"seed {seed}{' tetrahedron' if tetrahedron else ''}"
            if not rep.class_vanishes == rep.brute_force == rep.expanded:
                failures.append(f"{label}: class {rep.class_vanishes}, search {rep.brute_force}, "
                                f"expansion {rep.expanded}")
            if rep.expanded and not rep.restricts:
                failures.append(f"{label}: expansion does not restrict to B")
            counts["vanishing" if rep.class_vanishes else "obstructed"] += 1
    report(capsys, 4, "obstruction equivalence", failures,
           f"({counts['vanishing']} vanishing, {counts['obstructed']} obstructed, "
           f"{counts['skipped']} past the guard)")


def test_nerve_complex(capsys):
    cover = F.tetrahedron_cover(["1", "2", "3", "4"])
    H = complex_cohomology(nerve_complex(cover, [2]), 2)
    failures = [] if H.invariants == (2,) else [f"H² = {H.invariants}"]
    report(capsys, 5, "nerve complex", failures, f"(H² invariants {H.invariants})")


PRINCIPALITY_CASES = [("z4-pair", ["a"]), ("split-pair", ["b"]), ("two-orbit", ["a", "b"]),
                      ("z4-over-z2", ["*"]), ("s3-over-z2", ["*"]), ("d8-over-klein", ["*"]),
                      ("s3-times-z2", ["*"])]


def test_principality_witnesses(capsys):
    failures = []
    for name, T in PRINCIPALITY_CASES:
        for seed in range(3):
            G = F.fixture(name)
            H = rename_extension(G, seed)
            Phi = extensions_isomorphic(H, G).arrows
            phi = {h: g for h, g in Phi.items() if H.G.src[h] in T and H.G.tgt[h] in T}
            cd = connecting_bitorsor(G, H, phi, T)
            failures += [f"{name}/{seed}: {m}" for m in check_connecting(cd, phi)]
            back = {v: k for k, v in cd.psi.arrows.items()}
            u = {h: back[Phi[h]] for h in H.G.arrows}
            beta = recover_section(cd.twisted, u, cd.alpha)
            hits = [b for b in sections(cd.bitorsor)
                    if all(b[t] == cd.alpha[t] for t in T) and section_isomorphism(cd.twisted, b).arrows == u]
            if hits != [beta]:
                failures.append(f"{name}/{seed}: {len(hits)} sections match, recovered {beta}")
    report(capsys, 6, "principality witnesses", failures, f"({3 * len(PRINCIPALITY_CASES)} cases)")


def test_nonabelian(capsys):
    start = time.perf_counter()
    failures = []
    ext = F.fixture("s3-times-z2")
    cat = build_embedding_category(ext.E, iso_closed=True)
    classes = nonabelian_classes(extension_band(ext, cat))
    brute = enumerate_extensions(ext.E, ext.K, band_phi_choices(ext.E, ext.K, lift_action(ext).table))
    if len(classes) != 1 or len(brute.classes) != 1:
        failures.append(f"S3 band: {len(classes)} cocycle classes, {len(brute.classes)} brute-force classes")
    if any(len(c.G.arrows) != 12 for c in brute.classes):
        failures.append("brute-force tables are not of order 12")
    c = extension_to_nonabelian(ext, cat)
    w = nonabelian_equivalent(c, classes[0])
    if w is None or not check_witness(c, classes[0], w):
        failures.append("the extension is not equivalent to the class representative")
    agreements = 0
    for name in sorted(F.ABELIAN_FIXTURES):
        A = F.fixture(name)
        ctx = context_for(A, basis=basis_for(A))
        xi = extension_to_cocycle(A, ctx.cat)
        target = ctx.class_of(xi)
        for coords, v in ctx.H2.representatives():
            rep, _ = normalize_cocycle(ctx.cocycle(v))
            w = nonabelian_equivalent(abelian_to_nonabelian(xi), abelian_to_nonabelian(rep))
            agreements += 1
            if (w is not None) != (coords == target):
                failures.append(f"{name}: equivalence {w is not None}, linear test {coords == target}")
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        failures.append(f"took {elapsed:.1f}s")
    report(capsys, 7, "non-abelian", failures,
           f"({elapsed:.1f}s, {brute.tables} S3 tables, {agreements} abelian comparisons)")


def test_homological_plumbing(capsys):
    failures = []
    rng = np.random.default_rng(2024)
    complexes = []
    for name in sorted(F.ABELIAN_FIXTURES):
        ext = F.fixture(name)
        cat = build_embedding_category(ext.E, basis_for(ext), iso_closed=True)
        A = sections_presheaf(cat, ext.K, induced_action(ext).table)
        complexes.append((name, cat, A))
    for trial in range(1000):
        name, cat, A = complexes[trial % len(complexes)]
        cx = CategoryComplex(cat, A, relative_to=cat.units if trial % 2 else None)
        n = int(rng.integers(0, 3))
        v = np.array([rng.integers(0, m) for m in cx.group(n)], dtype=np.int64)
        w = (cx.d(n + 1) @ ((cx.d(n) @ v) % np.array(cx.group(n + 1), dtype=np.int64)))
        if (w % np.array(cx.group(n + 2), dtype=np.int64)).any():
            failures.append(f"d∘d ≠ 0 on {name} in degree {n}")
    for name, cat, A in complexes:
        rep = les_check(cat, cat.units, A, 3)
        if not rep.ok:
            failures.append(f"{name}: long exact sequence {rep.failures[:1]}")
    for name, along, singletons in [("z4-over-z2", {"p": "*", "q": "*"}, False),
                                    ("two-orbit", {"a1": "a", "a2": "a", "b": "b"}, True)]:
        ext = F.fixture(name)
        mu = induced_action(ext)
        P, hom = pullback_groupoid(ext.E, along)
        K2, mu2 = pullback_coefficients(hom, ext.K, mu)
        pulled = relative_h2(P, K2, mu2, [(x,) for x in P.objects] if singletons else None)
        base = relative_h2(ext.E, ext.K, mu, singleton_basis(ext) if singletons else None)
        if pulled != base:
            failures.append(f"{name}: relative H² {base} but {pulled} after pullback")
    report(capsys, 8, "homological plumbing", failures, "(1000 cochains, LES to degree 3, 2 Morita pairs)")
