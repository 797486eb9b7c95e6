"""Command-line surface: ``gpdext <command> --input FILE [--output json|text]``.

Exit codes: 0 success, 1 mathematical negative, 2 input error, 3 guard exceeded.
"""
from __future__ import annotations

import json
import sys

import click

from . import serialize as S
from .classification import context_for, extension_to_cocycle, roundtrip_cocycle, roundtrip_extension
from .cohomology import CategoryComplex, complex_cohomology, describe
from .embedding import build_embedding_category, sections_presheaf
from .errors import GroupoidError, GuardExceeded, NotNormalError
from .extension import baer_sum, induced_action, restrict_extension, twist
from .groupoid import FiniteGroupoid, full_subgroupoid, orbits, quotient_by_bundle

OK, NEGATIVE, INPUT_ERROR, GUARD = 0, 1, 2, 3
DEFAULT_GUARD = 10 ** 7


class Outcome(Exception):
    def __init__(self, payload: dict, code: int = OK):
        self.payload, self.code = payload, code


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return S.dumps(payload)
    lines = []
    for key, value in payload.items():
        if isinstance(value, dict) and "kind" in value:
            value = f"<{value['kind']} document; use --output json>"
        elif isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def common(f):
    f = click.option("--output", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)(f)
    f = click.option("--guard", type=int, default=DEFAULT_GUARD, show_default=True,
                     help="Largest search space to attempt.")(f)
    f = click.option("--relative", is_flag=True, help="Relative to the unit subcategory.")(f)
    f = click.option("--degree", type=int, default=2, show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--input", "path", type=click.Path(dir_okay=False), default=None)(f)
    return f


def run(compute):
    """Wrap a command body: map exceptions to exit codes and print the payload."""
    def command(path, seed, degree, relative, guard, fmt):
        try:
            payload, code = compute(path, seed=seed, degree=degree, relative=relative, guard=guard), OK
        except Outcome as out:
            payload, code = out.payload, out.code
        except GuardExceeded as e:
            payload, code = {"error": "guard exceeded", "size": e.size, "guard": e.guard, "what": e.what}, GUARD
        except (GroupoidError, KeyError, ValueError, TypeError) as e:
            payload, code = {"error": "input error", "message": str(e)}, INPUT_ERROR
        click.echo(render(payload, fmt), nl=False)
        sys.exit(code)
    command.__name__ = compute.__name__
    command.__doc__ = compute.__doc__
    return command


def _document(path):
    if path is None:
        raise S.SchemaError("--input is required")
    return S.read_document(path)


def _load(path, *kinds):
    doc, ctx = _document(path)
    if kinds and doc["kind"] not in kinds:
        raise S.SchemaError(f"expected a {' or '.join(kinds)} document, got {doc['kind']}")
    return doc, ctx, S.load_document(doc, ctx) if doc["kind"] in S.LOADERS else None


def _coefficients(path):
    doc, ctx = _document(path)
    if doc["kind"] not in ("coefficients", "extension"):
        raise S.SchemaError("expected a coefficients or extension document")
    E, K, mu = S.coefficients_from_doc(doc, ctx)
    problems = S.validate_object((E, K, mu))
    if problems:
        raise GroupoidError(problems[0])
    return doc, ctx, E, K, mu


@click.group()
def main():
    """Finite groupoid extensions: cohomology, classification and obstructions."""


@main.command("validate")
@common
@run
def validate_cmd(path, **_):
    """Check every axiom of the object in the input document."""
    doc, ctx = _document(path)
    kind = doc["kind"]
    if kind in S.LOADERS:
        problems = S.validate_object(S.LOADERS[kind](doc, ctx))
    elif kind == "baer":
        problems = [f"first: {p}" for p in S.validate_object(S.extension_from_doc(doc["first"], ctx))]
        problems += [f"second: {p}" for p in S.validate_object(S.extension_from_doc(doc["second"], ctx))]
    elif kind == "twist":
        problems = S.validate_object(S.extension_from_doc(doc["extension"], ctx))
        problems += S.validate_object(S.bitorsor_from_doc(doc["bitorsor"], ctx))
    else:
        problems = S.validate_object(S.groupoid_from_doc(doc["groupoid"], ctx))
    payload = {"kind": kind, "valid": not problems, "problems": problems}
    if problems:
        raise Outcome(payload, NEGATIVE)
    return payload


@main.command("orbits")
@common
@run
def orbits_cmd(path, **_):
    """Connected components of a groupoid (the base of an extension or coefficient system)."""
    doc, ctx, obj = _load(path, "groupoid", "extension", "coefficients")
    E = obj if isinstance(obj, FiniteGroupoid) else (obj.E if doc["kind"] == "extension" else obj[0])
    blocks = orbits(E)
    return {"count": len(blocks), "orbits": [list(b) for b in blocks]}


@main.command("restrict")
@common
@run
def restrict_cmd(path, **_):
    """Restrict a groupoid or extension to the objects listed under "T"."""
    doc, ctx, obj = _load(path, "groupoid", "extension")
    if "T" not in doc:
        raise S.SchemaError("restrict needs a \"T\" list of objects")
    T = [str(t) for t in doc["T"]]
    if isinstance(obj, FiniteGroupoid):
        missing = [t for t in T if t not in obj.objects]
        if missing:
            raise GroupoidError(f"{missing[0]} is not an object")
        return {"T": T, "result": S.to_document(full_subgroupoid(obj, T))}
    return {"T": T, "result": S.to_document(restrict_extension(obj, T))}


@main.command("quotient")
@common
@run
def quotient_cmd(path, **_):
    """Quotient of a groupoid by a normal subbundle of its isotropy ("kernel": {x: [arrows]})."""
    doc, ctx = _document(path)
    if doc["kind"] != "quotient":
        raise S.SchemaError("expected a quotient document with \"groupoid\" and \"kernel\"")
    G = S.groupoid_from_doc(doc["groupoid"], ctx)
    try:
        E, pi = quotient_by_bundle(G, doc["kernel"])
    except NotNormalError as e:
        raise Outcome({"normal": False, "witness": list(e.witness), "message": str(e)}, NEGATIVE)
    return {"normal": True, "quotient": S.to_document(E), "projection": dict(pi.arr_map)}


@main.command("cohomology")
@common
@run
def cohomology_cmd(path, degree, relative, **_):
    """H^n of the embedding category with coefficients in the sections of K."""
    doc, ctx, E, K, mu = _coefficients(path)
    if not K.is_abelian:
        raise GroupoidError("cohomology needs abelian K")
    if degree < 0:
        raise GroupoidError("degree must be non-negative")
    cat = build_embedding_category(E, iso_closed=True)
    A = sections_presheaf(cat, K, mu.table)
    cx = CategoryComplex(cat, A, relative_to=cat.units if relative else None)
    H = complex_cohomology(cx, degree)
    return {"degree": degree, "relative": relative, "group": describe(H.invariants),
            "invariants": list(H.invariants), "order": H.order}


def _nonabelian_band(doc, ctx, E, K, mu, cat):
    from .nonabelian import band_from_action, extension_band
    if doc["kind"] == "extension":
        return extension_band(S.extension_from_doc(doc, ctx), cat)
    return band_from_action(cat, K, mu.table)


@main.command("classify")
@common
@run
def classify_cmd(path, guard, **_):
    """Count extension classes with the given coefficients via relative H² (or non-abelian cocycles)."""
    doc, ctx, E, K, mu = _coefficients(path)
    if K.is_abelian:
        cx = context_for(E, K, mu)
        H = cx.H2
        return {"method": "relative-cohomology", "group": describe(H.invariants), "classes": H.order,
                "representatives": [list(c) for c, _ in H.representatives()]}
    from .nonabelian import nonabelian_classes
    cat = build_embedding_category(E, iso_closed=True)
    reps = nonabelian_classes(_nonabelian_band(doc, ctx, E, K, mu, cat), guard)
    return {"method": "non-abelian-cocycles", "classes": len(reps)}


@main.command("enumerate-extensions")
@common
@run
def enumerate_cmd(path, guard, **_):
    """Brute force: every normalized factor set, deduplicated up to isomorphism of extensions."""
    from .oracles import action_phi_choices, band_phi_choices, enumerate_extensions
    doc, ctx, E, K, mu = _coefficients(path)
    if K.is_abelian:
        choices = action_phi_choices(E, mu.table)
    else:
        choices = band_phi_choices(E, K, mu.table)
    res = enumerate_extensions(E, K, choices, guard)
    return {"method": "factor-set-enumeration", "tables": res.tables, "classes": len(res.classes)}


@main.command("roundtrip")
@common
@run
def roundtrip_cmd(path, seed, **_):
    """Extension -> cocycle -> extension and cocycle -> extension -> cocycle.

    Without --input a random instance is drawn from --seed.
    """
    if path is None:
        from .fixtures import random_abelian_data
        from .oracles import random_schreier_extension
        E, K, mu = random_abelian_data(seed)
        ext = random_schreier_extension(E, K, mu.table, seed)
        source = f"random instance {seed}"
    else:
        _, _, ext = _load(path, "extension")
        source = path
    if not ext.K.is_abelian:
        raise GroupoidError("round trips need abelian K")
    cat = build_embedding_category(ext.E, iso_closed=True)
    a = roundtrip_extension(ext, cat)
    b = roundtrip_cocycle(extension_to_cocycle(ext, cat))
    payload = {"source": str(source), "extension_roundtrip": a.ok, "cocycle_roundtrip": b.ok,
               "failures": a.failures + b.failures}
    if not (a.ok and b.ok):
        raise Outcome(payload, NEGATIVE)
    return payload


@main.command("baer")
@common
@run
def baer_cmd(path, **_):
    """Baer sum of "first" and "second"; checks that classes add."""
    doc, ctx = _document(path)
    if doc["kind"] != "baer":
        raise S.SchemaError("expected a baer document with \"first\" and \"second\"")
    A = S.load_document({"format": 1, "kind": "extension", **_inline(doc["first"], ctx)}, ctx)
    B = S.load_document({"format": 1, "kind": "extension", **_inline(doc["second"], ctx)}, ctx)
    total = baer_sum(A, B).extension
    cx = context_for(A)
    H = cx.H2
    ca, cb, cs = (cx.class_of(extension_to_cocycle(x, cx.cat)) for x in (A, B, total))
    expected = tuple((p + q) % m for p, q, m in zip(ca, cb, H.orders))
    payload = {"group": describe(H.invariants), "first": list(ca), "second": list(cb), "sum": list(cs),
               "additive": tuple(cs) == expected, "extension": S.to_document(total)}
    if tuple(cs) != expected:
        raise Outcome(payload, NEGATIVE)
    return payload


@main.command("twist")
@common
@run
def twist_cmd(path, **_):
    """P ⊗ G ⊗ P⁻¹ for a bitorsor P ("bitorsor") and an extension G ("extension")."""
    from .torsor import validate_bitorsor
    doc, ctx = _document(path)
    if doc["kind"] != "twist":
        raise S.SchemaError("expected a twist document with \"extension\" and \"bitorsor\"")
    ext = S.load_document({"format": 1, "kind": "extension", **_inline(doc["extension"], ctx)}, ctx)
    P = S.bitorsor_from_doc(doc["bitorsor"], ctx)
    problems = validate_bitorsor(P)
    if problems:
        raise GroupoidError(f"bitorsor: {problems[0]}")
    tw = twist(P, ext)
    return {"extension": S.to_document(tw.extension)}


@main.command("obstruct")
@common
@run
def obstruct_cmd(path, guard, **_):
    """Expand B over E_T to all of E along a cover: obstruction class, lifting search and expansion."""
    from .obstruction import build_cover_data, obstruct
    doc, ctx, data = _load(path, "cover")
    cd = build_cover_data(data["E"], data["T"], data["cover"], data["choices"])
    rep = obstruct(data["B"], cd, guard)
    payload = {
        "class_vanishes": rep.class_vanishes,
        "obstruction_group": None if rep.obstruction is None else describe(rep.obstruction.group.invariants),
        "obstruction_class": None if rep.obstruction is None else list(rep.obstruction.coords),
        "lifting_exists": rep.brute_force,
        "expanded": rep.expanded,
        "restricts": rep.restricts,
        "notes": rep.notes,
    }
    if not rep.expanded:
        raise Outcome(payload, NEGATIVE)
    payload["expansion"] = S.to_document(rep.expansion.extension)
    return payload


def _inline(ref, ctx) -> dict:
    d = S._resolve(ref, ctx, "extension")
    return {k: v for k, v in d.items() if k not in ("format", "kind")}


if __name__ == "__main__":
    main()
