import json
import subprocess
import sys

import pytest

from ciext.cli import main
from ciext.harness import (CSV_HEADER, FixtureError, Report, ValidationError, emit_report,
                           load_fixture, run_experiment, shipped_fixtures)


def write(tmp_path, data, name="fx.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2) if isinstance(data, dict) else data)
    return str(path)


BASE = {"name": "tiny", "prime": 5, "variables": ["x", "y"], "f": ["x^2"],
        "M": "residue_field", "N": "free", "I": ["y"]}


def test_load_shipped_fixture():
    fx = load_fixture("f1")
    assert fx.name == "f1" and fx.ring.c == 1 and fx.ring.p == 2
    assert fx.window == {"imax": 6, "nmax": 4, "jmax": 4}
    assert fx.length == 8
    assert [p.label for p in fx.candidates] == ["(x)"]
    assert shipped_fixtures() == ["f1", "f2", "f3", "f4", "f5", "f6", "f7"]


def test_regular_sequence_rejected(tmp_path):
    path = write(tmp_path, dict(BASE, f=["x^2", "x^3"]))
    with pytest.raises(ValidationError) as err:
        load_fixture(path)
    assert err.value.invariant == "regular-sequence"
    assert "not a regular sequence" in str(err.value)


def test_undeclared_variable_has_position(tmp_path):
    path = write(tmp_path, '{"variables": ["x", "y"],\n "f": ["x^2 + z^2"], "M": "free", "N": "free"}')
    with pytest.raises(FixtureError) as err:
        load_fixture(path)
    assert (err.value.line, err.value.column) == (2, 15)


def test_other_input_errors(tmp_path):
    with pytest.raises(FixtureError) as err:
        load_fixture(write(tmp_path, '{"variables": ["x"],\n  oops}'))
    assert err.value.line == 2
    with pytest.raises(ValidationError) as err:
        load_fixture(write(tmp_path, dict(BASE, prime=6)))
    assert err.value.invariant == "prime"
    with pytest.raises(ValidationError) as err:
        load_fixture(write(tmp_path, dict(BASE, I=["x + y^2"])))
    assert err.value.invariant == "homogeneous"
    with pytest.raises(ValidationError) as err:
        load_fixture(write(tmp_path, dict(BASE, length=4, window={"imax": 6})))
    assert err.value.invariant == "window"
    with pytest.raises(FixtureError):
        load_fixture(str(tmp_path / "missing.json"))


def test_window_precedence(tmp_path, monkeypatch):
    path = write(tmp_path, BASE)
    assert load_fixture(path).window == {"imax": 6, "nmax": 4, "jmax": 4}
    monkeypatch.setenv("CIEXT_NMAX", "2")
    assert load_fixture(path).window["nmax"] == 2
    fixed = write(tmp_path, dict(BASE, window={"nmax": 3}), "fixed.json")
    assert load_fixture(fixed).window["nmax"] == 3
    assert load_fixture(fixed, {"nmax": 1}).window["nmax"] == 1


def test_f1_ass_scan_report():
    r = run_experiment(load_fixture("f1"), "ass-scan")
    assert r.exit_code == 0
    stab = r.sections["ass"]["stabilization"]
    assert (stab["i0"], stab["n0"]) == (1, 2)
    assert r.sections["ass"]["union"] == ["(x)"]
    assert all(c.status == "pass" for c in r.checks)


def test_f1_cx_scan_report():
    r = run_experiment(load_fixture("f1"), "cx-scan")
    cx = r.sections["cx"]
    assert cx["jstar"] == 2 and [v for _, v in cx["values"]][2:] == [0, 0, 0]


def test_free_module_rows_only():
    r = run_experiment(load_fixture("f4"), "ass-scan")
    assert all(not c["ass"] for c in r.sections["ass"]["cells"] if c["i"] >= 1)
    assert any(c["ass"] for c in r.sections["ass"]["cells"] if c["i"] == 0)


def test_csv_rows_and_header():
    out = emit_report(run_experiment(load_fixture("f1"), "ass-scan"), "csv").decode()
    lines = out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert "f1,0,1,1,1,(x)" in lines
    assert "f1,0,0,0,0," in lines
    empty = emit_report(run_experiment(load_fixture("f1"), "gb"), "csv").decode()
    assert empty == ",".join(CSV_HEADER) + "\n"


def test_json_round_trip():
    r = run_experiment(load_fixture("f6"), "verify")
    back = Report.from_dict(json.loads(emit_report(r, "json")))
    assert back == Report.from_dict(json.loads(json.dumps(r.to_dict())))
    assert emit_report(back, "json") == emit_report(r, "json")


def test_markdown_highlights_stable_region():
    md = emit_report(run_experiment(load_fixture("f1"), "ass-scan"), "markdown").decode()
    assert "| 2 | - | (x) | **-** | **-** | **-** |" in md
    assert "(i0, n0) = (1, 2)" in md


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify", "--fixture", "f1"]) == 0
    for neg in ("f1_wrong_stabilization", "f6_wrong_cx", "f4_wrong_ass"):
        assert main(["verify", "--fixture", neg]) == 1
    assert main(["ass-scan", "--fixture", "f1", "--imax", "20"]) == 2
    assert main(["ass-scan"]) == 2
    assert main(["cx-scan", "--fixture", "f1", "--jmax", "1"]) == 3
    bad = write(tmp_path, dict(BASE, f=["x^2", "x^3"]))
    assert main(["gb", "--fixture", bad]) == 2
    err = capsys.readouterr().err
    assert "not a regular sequence" in err


def test_cli_determinism_across_runs_and_threads(tmp_path):
    outs = []
    for threads in ("1", "1", "4"):
        path = tmp_path / f"out{len(outs)}.json"
        assert main(["verify", "--threads", threads, "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    data = json.loads(outs[0])
    assert [r["fixture"] for r in data] == shipped_fixtures()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ciext", "ass-scan", "--fixture", "f1",
                           "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(CSV_HEADER)
