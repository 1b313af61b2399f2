import io
import json
import subprocess
import sys

import pytest

from markovmaps.cli import main
from markovmaps.core import parse_spec, to_document
from markovmaps.fixtures import fixture_path, load_document

EX71 = str(fixture_path("example-7-1"))
EX72 = str(fixture_path("example-7-2"))


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", EX71)
    assert code == 0 and out.strip() == "valid"


def test_validate_overlap(capsys, tmp_path):
    doc = load_document("example-7-1")
    dup = dict(doc["symbols"][0], name="a9")
    doc["symbols"].append(dup)
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 2 and "proper-parametrization: overlap(a1,a9)" in out


def test_validate_violations(capsys, tmp_path):
    doc = load_document("example-7-1")
    doc["symbols"] = [s for s in doc["symbols"] if s["name"] not in ("a2", "a3")]
    path = tmp_path / "gap.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 2 and "condition (6)" in out


def test_io_and_parse_errors(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 64
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", str(bad))[0] == 65
    bad.write_text(json.dumps({"partition": ["0", "x"]}))
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 65 and "$.partition[1]" in err
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "analyze", EX71, "--format", "yaml")[0] == 64
    assert run(capsys, "analyze", EX71, "--bound", "0")[0] == 64


def test_stdin(capsys, monkeypatch):
    text = json.dumps(load_document("example-7-1"))
    code, out, _ = run(capsys, "validate", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 0


def test_analyze_mixing_fixture(capsys):
    code, out, _ = run(capsys, "analyze", EX71, "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["essential"]["symbols"] == ["a1", "a2", "a3"]
    assert doc["conditions"]["CC"]["witness"]["gamma"] == "1/2"
    assert doc["forward"]["specification"]["status"] == "holds"
    assert doc["inverse"]["specification"]["status"] == "holds"


def test_analyze_four_value_fixture(capsys):
    code, out, _ = run(capsys, "analyze", EX72, "--format", "json")
    doc = json.loads(out)
    assert doc["conditions"]["MC"]["status"] == "holds"
    assert doc["conditions"]["CC"]["status"] == "fails"
    assert doc["forward"]["transitive"]["status"] == "unknown"
    assert doc["forward"]["transitive"]["caveat"] and doc["caveat"]


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", EX71)
    assert code == 0 and "specification: holds" in out


def test_bound_caveat(capsys):
    path = str(fixture_path("split-components"))
    doc = json.loads(run(capsys, "analyze", path, "--bound", "1", "--format", "json")[1])
    assert doc["caveat"] is True
    doc = json.loads(run(capsys, "analyze", path, "--format", "json")[1])
    assert doc["caveat"] is False


def test_analyze_refuses_improper(capsys, tmp_path):
    doc = load_document("example-7-1")
    doc["symbols"] = [s for s in doc["symbols"] if s["name"] != "a4"]
    path = tmp_path / "improper.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "analyze", str(path))[0] == 2


def test_report_is_deterministic(capsys):
    first = run(capsys, "analyze", EX71, "--format", "json")[1]
    assert run(capsys, "analyze", EX71, "--format", "json")[1] == first
    first = run(capsys, "witness", EX71, "spec", "--seed", "5", "--format", "json")[1]
    assert run(capsys, "witness", EX71, "spec", "--seed", "5", "--format", "json")[1] == first


@pytest.mark.parametrize("kind", ["connect", "periodic", "spec"])
def test_witness_passes(capsys, kind):
    code, out, _ = run(capsys, "witness", EX71, kind, "--format", "json", "--seed", "11",
                       "--epsilon", "1/100")
    doc = json.loads(out)
    assert code == 0 and set(doc["self_check"].values()) == {"passed"}


def test_witness_explicit_inputs(capsys):
    code, out, _ = run(capsys, "witness", EX71, "connect", "--head", "1/4,1/2", "--tail", "3/4,3/4",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["x"] == ["1/4", "1/2"]
    code, out, _ = run(capsys, "witness", EX71, "spec", "--segment", "1/4,1/2", "--segment", "0",
                       "--gap", "2", "--gap", "3", "--format", "json")
    assert code == 0 and json.loads(out)["gaps"] == [2, 3]


def test_witness_refusals(capsys):
    code, _, err = run(capsys, "witness", EX72, "periodic")
    assert code == 1 and "CC: fails" in err
    code, _, err = run(capsys, "witness", EX71, "spec", "--segment", "0", "--gap", "0")
    assert code == 1 and "N2 = 1" in err
    code, _, err = run(capsys, "witness", EX71, "periodic", "--head", "1/4,1/3")
    assert code == 64


def test_export_graph(capsys):
    code, out, _ = run(capsys, "export-graph", EX71)
    rows = out.strip().splitlines()
    assert [r.split(",")[0] for r in rows].count("segment") == 3
    assert [r.split(",")[0] for r in rows].count("point") == 4
    assert "segment,0,0,1/2,1" in rows
    code, out, _ = run(capsys, "export-graph", str(fixture_path("identity")))
    assert out == "segment,0,0,1,1\n"
    code, out, _ = run(capsys, "export-graph", str(fixture_path("identity")), "--header")
    assert out.splitlines()[0] == "kind,x0,y0,x1,y1"


def test_language_and_components(capsys):
    code, out, _ = run(capsys, "language", EX71, "2", "--restrict", "a1,a2,a3")
    assert out.split("\n")[:6] == ["a1 a1", "a1 a2", "a1 a3", "a2 a2", "a2 a3", "a3 a1"]
    assert run(capsys, "language", EX71, "2", "--restrict", "zz")[0] == 64
    code, out, _ = run(capsys, "components", EX71, "--format", "json")
    comps = json.loads(out)
    assert comps[0] == {"symbols": ["a1", "a2", "a3"], "period": 1, "irreducible": True, "mixing": True}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "markovmaps", "validate", EX71],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "valid"


def test_round_trip_through_cli_format():
    doc = load_document("example-7-2")
    assert to_document(parse_spec(to_document(parse_spec(doc)))) == to_document(parse_spec(doc))
