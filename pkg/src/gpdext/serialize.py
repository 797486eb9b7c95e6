"""Versioned JSON documents for groups, groupoids, bundles, actions, extensions, bitorsors and covers.

Every document carries ``"format": 1`` and a ``kind``. Fields are written in a fixed
order so saved files diff cleanly. Sub-objects may be inline documents or the name of
a sibling file (``"E": "base"`` resolves ``base.json`` next to the referring file).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import GroupoidError
from .extension import ActionData, Extension, trivial_action, validate_action, validate_extension
from .groupoid import FiniteGroupoid, GroupBundle, transitive_groupoid, validate_groupoid
from .groups import FiniteGroup, parse_group
from .torsor import Bitorsor, validate_bitorsor, with_automorphism

FORMAT = 1


class SchemaError(GroupoidError):
    """The document does not parse or does not match the schema."""


# groups

def group_to_doc(G: FiniteGroup):
    if G.name:
        try:
            if parse_group(G.name) == G:
                return G.name
        except ValueError:
            pass
    doc: dict[str, Any] = {"labels": list(G.labels), "table": [list(r) for r in G.table]}
    if G.name:
        doc["name"] = G.name
    return doc


def group_from_doc(doc) -> FiniteGroup:
    if isinstance(doc, str):
        try:
            return parse_group(doc)
        except ValueError as e:
            raise SchemaError(str(e)) from None
    _require(doc, "table", "group")
    try:
        return FiniteGroup(doc["table"], doc.get("labels"), doc.get("name"))
    except (ValueError, TypeError) as e:
        raise SchemaError(f"group: {e}") from None


# groupoids

def groupoid_to_doc(G: FiniteGroupoid) -> dict:
    return {
        "format": FORMAT, "kind": "groupoid",
        "objects": list(G.objects),
        "arrows": [{"id": a, "src": G.src[a], "tgt": G.tgt[a]} for a in G.arrows],
        "compose": [[g, h, gh] for (g, h), gh in G.compose.items()],
        "units": {x: G.units[x] for x in G.objects},
    }


def groupoid_from_doc(doc, ctx: "_Context | None" = None) -> FiniteGroupoid:
    doc = _resolve(doc, ctx, "groupoid")
    if "group" in doc:
        return transitive_groupoid(doc.get("objects", ["*"]), group_from_doc(doc["group"]))
    for key in ("objects", "arrows", "compose", "units"):
        _require(doc, key, "groupoid")
    try:
        arrows = {a["id"]: (a["src"], a["tgt"]) for a in doc["arrows"]}
        compose = {(g, h): gh for g, h, gh in doc["compose"]}
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"groupoid: malformed arrow or compose entry ({e})") from None
    return FiniteGroupoid(doc["objects"], arrows, compose, doc["units"])


# bundles and actions

def bundle_to_doc(K: GroupBundle) -> dict:
    return {"format": FORMAT, "kind": "bundle", "fibers": {x: group_to_doc(K[x]) for x in K.base}}


def bundle_from_doc(doc, ctx=None) -> GroupBundle:
    doc = _resolve(doc, ctx, "bundle")
    _require(doc, "fibers", "bundle")
    return GroupBundle({str(x): group_from_doc(g) for x, g in doc["fibers"].items()})


def action_to_doc(mu: ActionData) -> dict:
    return {a: list(mu.table[a]) for a in mu.E.arrows}


def action_from_doc(doc, E: FiniteGroupoid, K: GroupBundle) -> ActionData:
    if doc is None or doc == "trivial":
        return trivial_action(E, K)
    if not isinstance(doc, dict):
        raise SchemaError("action must be 'trivial' or a table {arrow: [k·e for k in K]}")
    return ActionData(E, K, {a: tuple(v) for a, v in doc.items()})


# extensions

def extension_to_doc(ext: Extension) -> dict:
    return {
        "format": FORMAT, "kind": "extension",
        "K": bundle_to_doc(ext.K)["fibers"],
        "G": _strip(groupoid_to_doc(ext.G)),
        "E": _strip(groupoid_to_doc(ext.E)),
        "j": {x: list(ext.j[x]) for x in ext.E.objects},
        "pi": {g: ext.pi[g] for g in ext.G.arrows},
    }


def extension_from_doc(doc, ctx=None) -> Extension:
    doc = _resolve(doc, ctx, "extension")
    if "fixture" in doc:
        from .fixtures import fixture
        return fixture(doc["fixture"])
    for key in ("K", "G", "E", "j", "pi"):
        _require(doc, key, "extension")
    E = groupoid_from_doc(doc["E"], ctx)
    G = groupoid_from_doc(doc["G"], ctx)
    K = _fibers(doc["K"], ctx, E.objects)
    return Extension(K, G, E, {x: tuple(v) for x, v in doc["j"].items()}, dict(doc["pi"]))


# coefficient systems (E, K, action)

def coefficients_to_doc(E: FiniteGroupoid, K: GroupBundle, mu: ActionData) -> dict:
    return {"format": FORMAT, "kind": "coefficients", "E": _strip(groupoid_to_doc(E)),
            "K": bundle_to_doc(K)["fibers"], "action": action_to_doc(mu)}


def coefficients_from_doc(doc, ctx=None) -> tuple[FiniteGroupoid, GroupBundle, ActionData]:
    doc = _resolve(doc, ctx, "coefficients")
    if doc.get("kind") == "extension":
        from .extension import induced_action, lift_action
        ext = extension_from_doc(doc, ctx)
        return ext.E, ext.K, induced_action(ext) if ext.K.is_abelian else lift_action(ext)
    _require(doc, "E", "coefficients")
    _require(doc, "K", "coefficients")
    E = groupoid_from_doc(doc["E"], ctx)
    K = _fibers(doc["K"], ctx, E.objects)
    return E, K, action_from_doc(doc.get("action"), E, K)


# bitorsors

def bitorsor_to_doc(P: Bitorsor) -> dict:
    doc: dict[str, Any] = {"format": FORMAT, "kind": "bitorsor",
                           "points": {x: list(P.points[x]) for x in P.base}}
    if P.right_bundle is not None:
        doc["right_group"] = {x: group_to_doc(P.right_bundle[x]) for x in P.base}
        doc["right"] = {x: [list(r) for r in P.right[x]] for x in P.base}
    if P.left_bundle is not None:
        doc["left_group"] = {x: group_to_doc(P.left_bundle[x]) for x in P.base}
        doc["left"] = {x: [list(r) for r in P.left[x]] for x in P.base}
    return doc


def bitorsor_from_doc(doc, ctx=None) -> Bitorsor:
    doc = _resolve(doc, ctx, "bitorsor")
    if "automorphism" in doc:
        _require(doc, "K", "bitorsor")
        K = _fibers(doc["K"], ctx, list(doc["automorphism"]))
        return with_automorphism(K, {x: tuple(s) for x, s in doc["automorphism"].items()})
    _require(doc, "points", "bitorsor")
    pts = {str(x): tuple(v) for x, v in doc["points"].items()}
    R = _fibers(doc["right_group"], ctx, pts) if "right_group" in doc else None
    L = _fibers(doc["left_group"], ctx, pts) if "left_group" in doc else None
    right = {x: [list(r) for r in v] for x, v in doc.get("right", {}).items()}
    left = {x: [list(r) for r in v] for x, v in doc.get("left", {}).items()}
    return Bitorsor(pts, R, L, right, left)


# covers (an obstruction problem: E, T, a cover of E, and B over E_T)

def cover_to_doc(E: FiniteGroupoid, T, cover, B: Extension, choices: dict | None = None) -> dict:
    doc = {"format": FORMAT, "kind": "cover", "E": _strip(groupoid_to_doc(E)), "T": list(T),
           "cover": [list(U) for U in cover], "B": _strip(extension_to_doc(B))}
    if choices:
        doc["choices"] = [[i, x, a] for (i, x), a in sorted(choices.items())]
    return doc


def cover_from_doc(doc, ctx=None) -> dict:
    doc = _resolve(doc, ctx, "cover")
    for key in ("E", "T", "cover", "B"):
        _require(doc, key, "cover")
    choices = {(int(i), str(x)): str(a) for i, x, a in doc.get("choices", [])}
    return {"E": groupoid_from_doc(doc["E"], ctx), "T": [str(t) for t in doc["T"]],
            "cover": [[str(x) for x in U] for U in doc["cover"]],
            "B": extension_from_doc(doc["B"], ctx), "choices": choices or None}


# documents and files

LOADERS = {
    "groupoid": groupoid_from_doc,
    "bundle": bundle_from_doc,
    "extension": extension_from_doc,
    "coefficients": coefficients_from_doc,
    "bitorsor": bitorsor_from_doc,
    "cover": cover_from_doc,
}


# documents bundling the inputs of one CLI command
COMPOSITE_KINDS = ("baer", "twist", "quotient")


class _Context:
    """Resolves references to sibling files by name."""

    def __init__(self, directory: Path | None):
        self.directory = directory

    def has(self, name: str) -> bool:
        return self.directory is not None and (self.directory / f"{name}.json").exists()

    def load(self, name: str) -> dict:
        if not self.has(name):
            raise SchemaError(f"unresolved reference {name!r}")
        return parse_text((self.directory / f"{name}.json").read_text(), f"{name}.json")


def parse_text(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: the top level must be an object")
    if doc.get("format") != FORMAT:
        raise SchemaError(f"{source}: expected \"format\": {FORMAT}, got {doc.get('format')!r}")
    if doc.get("kind") not in LOADERS and doc.get("kind") not in COMPOSITE_KINDS:
        raise SchemaError(f"{source}: unknown kind {doc.get('kind')!r}")
    return doc


def read_document(path) -> tuple[dict, _Context]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}") from None
    return parse_text(text, str(path)), _Context(p.parent)


def load(path):
    """Load and validate one document; returns the object its kind describes."""
    doc, ctx = read_document(path)
    return load_document(doc, ctx)


def load_document(doc: dict, ctx: _Context | None = None):
    obj = LOADERS[doc["kind"]](doc, ctx)
    problems = validate_object(obj)
    if problems:
        raise GroupoidError(f"{doc['kind']} fails validation: {problems[0]}")
    return obj


def validate_object(obj) -> list[str]:
    if isinstance(obj, FiniteGroupoid):
        return validate_groupoid(obj)
    if isinstance(obj, Extension):
        return validate_extension(obj)
    if isinstance(obj, Bitorsor):
        return validate_bitorsor(obj)
    if isinstance(obj, tuple) and len(obj) == 3 and isinstance(obj[2], ActionData):
        return validate_groupoid(obj[0]) or validate_action(obj[2])
    if isinstance(obj, dict) and "cover" in obj:
        return validate_groupoid(obj["E"]) or validate_extension(obj["B"])
    return []


def to_document(obj) -> dict:
    if isinstance(obj, FiniteGroupoid):
        return groupoid_to_doc(obj)
    if isinstance(obj, GroupBundle):
        return bundle_to_doc(obj)
    if isinstance(obj, Extension):
        return extension_to_doc(obj)
    if isinstance(obj, Bitorsor):
        return bitorsor_to_doc(obj)
    if isinstance(obj, tuple) and len(obj) == 3 and isinstance(obj[2], ActionData):
        return coefficients_to_doc(*obj)
    if isinstance(obj, dict) and "cover" in obj:
        return cover_to_doc(obj["E"], obj["T"], obj["cover"], obj["B"], obj.get("choices"))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any) -> str:
    """Canonical text: insertion-ordered keys, short lists kept on one line."""
    return _dump(doc, 0) + "\n"


def save(obj, path) -> None:
    Path(path).write_text(dumps(to_document(obj)))


def loads(text: str):
    return load_document(parse_text(text))


def same_extension(a: Extension, b: Extension) -> bool:
    return (a.K.fiber == b.K.fiber and a.G == b.G and a.E == b.E
            and {x: tuple(v) for x, v in a.j.items()} == {x: tuple(v) for x, v in b.j.items()}
            and dict(a.pi) == dict(b.pi))


# helpers

def _require(doc, key, kind):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{kind}: missing field {key!r}")


def _resolve(doc, ctx, kind) -> dict:
    if isinstance(doc, str):
        if ctx is None:
            raise SchemaError(f"{kind}: reference {doc!r} needs a file context")
        doc = ctx.load(doc)
    if not isinstance(doc, dict):
        raise SchemaError(f"{kind}: expected an object")
    return doc


def _fibers(doc, ctx, base) -> GroupBundle:
    """K given as one group for every point, a {point: group} map, or a bundle document."""
    if isinstance(doc, str) and not (ctx is not None and ctx.has(doc)):
        return GroupBundle.constant(base, group_from_doc(doc))
    if isinstance(doc, dict) and "fibers" not in doc and "table" not in doc and "kind" not in doc:
        return GroupBundle({str(x): group_from_doc(g) for x, g in doc.items()})
    if isinstance(doc, dict) and "table" in doc:
        return GroupBundle.constant(base, group_from_doc(doc))
    return bundle_from_doc(doc, ctx)


def _strip(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k not in ("format", "kind")}


def _dump(value, level: int) -> str:
    pad = "  " * level
    inner = "  " * (level + 1)
    flat = json.dumps(value, ensure_ascii=False)
    if not isinstance(value, (dict, list)) or len(flat) + len(pad) <= 100:
        return flat
    if isinstance(value, list):
        return "[\n" + ",\n".join(inner + _dump(v, level + 1) for v in value) + "\n" + pad + "]"
    items = [inner + json.dumps(k, ensure_ascii=False) + ": " + _dump(v, level + 1) for k, v in value.items()]
    return "{\n" + ",\n".join(items) + "\n" + pad + "}"
