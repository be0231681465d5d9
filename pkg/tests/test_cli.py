import io
import json

import pytest

from sewing.cli import run


def _run(args):
    buf = io.StringIO()
    code = run(args, stdout=buf)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def examples(tmp_path_factory):
    out = tmp_path_factory.mktemp("examples")
    code, _ = _run(["examples", "--out", str(out)])
    assert code == 0
    return out


def test_check_scalar_family(examples):
    code, text = _run(["check-solution", str(examples / "scalar-111.json"), "--json"])
    doc = json.loads(text)
    assert code == 0 and doc["pass"]
    assert len(doc["relations"]) == 32 and all(r["residual"] == 0 for r in doc["relations"])


def test_classify_zero(examples):
    code, text = _run(["classify-scalar", str(examples / "zero.json")])
    assert code == 0 and text.strip() == "Zero"


def test_classify_non_solution_fails(examples):
    code, _ = _run(["classify-scalar", str(examples / "not-a-solution.json")])
    assert code == 1


def test_check_failing_solution(examples):
    code, text = _run(["check-solution", str(examples / "not-a-solution.json"), "--json"])
    assert code == 1 and not json.loads(text)["pass"]


def test_prove_o4(examples, tmp_path):
    cert = tmp_path / "cert.json"
    left, right = str(examples / "corpus" / "o4-left.json"), str(examples / "corpus" / "o4-right.json")
    code, text = _run(["prove", left, right, "--out", str(cert)])
    assert code == 0
    doc = json.loads(cert.read_text())
    assert doc["certificate"]["length"] <= 14
    code, _ = _run(["verify", left, right, str(cert)])
    assert code == 0


def test_cardy_round_trip_through_files(examples, tmp_path):
    ext = tmp_path / "ext.json"
    code, _ = _run(["extract-cardy", str(examples / "solutions" / "matrix2plusC.json"), "--out", str(ext)])
    assert code == 0
    code, _ = _run(["check-cardy", str(ext)])
    assert code == 0
    code, text = _run(["build-solution", str(ext), "--json"])
    assert code == 0 and json.loads(text)["pass"]


def test_eval_independence(examples):
    files = [str(examples / "corpus" / f"mixed-sphere-{k}.json") for k in range(3)]
    code, text = _run(["eval", "library:groupZ2-embedded", *files, "--json"])
    doc = json.loads(text)
    assert code == 0 and all(x["residual"] < 1e-12 for x in doc["independence"])


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert _run(["check-solution", str(bad)])[0] == 2
    assert _run(["check-solution", str(tmp_path / "missing.json")])[0] == 2
    bad.write_text(json.dumps({"scalars": {"mo": "x"}}))
    assert _run(["classify-scalar", str(bad)])[0] == 2
    assert _run(["check-solution", "library:nope"])[0] == 2


def test_reports_are_byte_stable(examples):
    args = ["check-solution", str(examples / "solutions" / "groupZ2-embedded.json"), "--json"]
    assert _run(args) == _run(args)


def test_examples_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    _run(["examples", "--out", str(a)])
    _run(["examples", "--out", str(b)])
    for p in sorted(a.rglob("*.json")):
        assert p.read_bytes() == (b / p.relative_to(a)).read_bytes()


def test_rejects_non_positive_tolerance(examples):
    assert _run(["check-solution", str(examples / "zero.json"), "--tol", "0"])[0] == 2
