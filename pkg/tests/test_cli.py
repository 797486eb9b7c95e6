import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from gpdext import fixtures as F
from gpdext import serialize as S
from gpdext.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def invoke(*args):
    res = CliRunner().invoke(main, [str(a) for a in args])
    return res.exit_code, res.output


def invoke_json(*args):
    code, out = invoke(*args, "--output", "json")
    return code, json.loads(out)


@pytest.mark.parametrize("name,code", [("split-z2.json", 0), ("s3-times-z2.json", 0), ("pair-groupoid.json", 0),
                                       ("nonassociative.json", 1), ("broken.json", 2)])
def test_validate(name, code):
    got, out = invoke("validate", "--input", DATA / name)
    assert got == code, out
    if name == "nonassociative.json":
        assert "associativity fails" in out


def test_missing_input_is_an_input_error():
    code, doc = invoke_json("validate")
    assert code == 2 and doc["error"] == "input error"
    code, _ = invoke("validate", "--input", DATA / "does-not-exist.json")
    assert code == 2


def test_orbits_and_restrict(tmp_path):
    code, doc = invoke_json("orbits", "--input", DATA / "pair-groupoid.json")
    assert code == 0 and doc["count"] == 1
    for name, code_expected in (("z4-pair", 0), ("two-orbit", 2)):
        path = tmp_path / f"{name}.json"
        d = S.to_document(F.fixture(name))
        d["T"] = ["a"]
        path.write_text(S.dumps(d))
        code, doc = invoke_json("restrict", "--input", path)
        assert code == code_expected
    assert doc["message"] == "transversal does not meet every orbit"
    code, _ = invoke("restrict", "--input", DATA / "split-z2.json")
    assert code == 2


def test_quotient(tmp_path):
    code, doc = invoke_json("quotient", "--input", DATA / "quotient-z4.json")
    assert code == 0 and doc["normal"]


@pytest.mark.parametrize("relative,group", [(True, "Z/2"), (False, None)])
def test_cohomology(relative, group):
    args = ["cohomology", "--input", DATA / "bz2-coefficients.json", "--degree", 2]
    code, doc = invoke_json(*args, *(["--relative"] if relative else []))
    assert code == 0 and doc["relative"] == relative
    if group:
        assert doc["group"] == group


def test_negative_degree_rejected():
    code, _ = invoke("cohomology", "--input", DATA / "bz2-coefficients.json", "--degree", -1)
    assert code == 2


@pytest.mark.parametrize("name,classes", [("bz4-z2.json", 2), ("s3-times-z2.json", 1)])
def test_classify_matches_enumeration(name, classes):
    code, a = invoke_json("classify", "--input", DATA / name)
    assert code == 0 and a["classes"] == classes
    code, b = invoke_json("enumerate-extensions", "--input", DATA / name)
    assert code == 0 and b["classes"] == classes


def test_guard_exit_code():
    code, doc = invoke_json("enumerate-extensions", "--input", DATA / "s3-times-z2.json", "--guard", 1)
    assert code == 3 and doc["error"] == "guard exceeded"


def test_roundtrip_file_and_seed():
    code, doc = invoke_json("roundtrip", "--input", DATA / "z4-over-z2.json")
    assert code == 0 and doc["extension_roundtrip"] and doc["cocycle_roundtrip"]
    code, doc = invoke_json("roundtrip", "--seed", 7)
    assert code == 0 and doc["source"] == "random instance 7"


def test_baer():
    code, doc = invoke_json("baer", "--input", DATA / "baer-z4.json")
    assert code == 0 and doc["additive"] and doc["sum"] == [0]
    assert doc["extension"]["kind"] == "extension"


def test_twist():
    code, doc = invoke_json("twist", "--input", DATA / "twist-z4.json")
    assert code == 0
    assert S.load_document(doc["extension"]) is not None


def test_obstruct():
    code, doc = invoke_json("obstruct", "--input", DATA / "obstruct-z4-pair.json")
    assert code == 0 and doc["class_vanishes"] and doc["lifting_exists"] and doc["restricts"]
    assert list(S.load_document(doc["expansion"]).E.objects) == ["a", "b"]


def test_text_output_collapses_documents():
    code, out = invoke("baer", "--input", DATA / "baer-z4.json")
    assert code == 0 and "<extension document; use --output json>" in out


@pytest.mark.parametrize("args", [
    ("classify", "--input", DATA / "bz4-z2.json"),
    ("roundtrip", "--seed", 3),
    ("obstruct", "--input", DATA / "obstruct-z4-pair.json"),
])
def test_output_is_deterministic(args):
    assert invoke(*args, "--output", "json") == invoke(*args, "--output", "json")
