from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from lfedge import bounds, families
from lfedge.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_theorem1_json(capsys):
    code, out, _ = call(capsys, "bound", "theorem1", "--family", "dirichlet", "--q", "163", "--index", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    res = doc["results"]
    assert res["mode"] == "theorem1"
    assert set(res["components"]) == set(bounds.COMPONENTS)
    assert res["bound_log"] == pytest.approx(sum(res["components"].values()))
    assert doc["constants_digest"] == bounds.Constants().digest
    assert res["params"]["x"] > 0 and "sigma0" in res["params"]


def test_bound_csv_schema(capsys):
    code, out, _ = call(capsys, "bound", "lemma3", "--family", "dirichlet", "--q", "7", "--index", "1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    for name in bounds.COMPONENTS + ("label", "mode", "x", "bound_log"):
        assert name in rows[0]


@pytest.mark.parametrize("mode,extra", [
    ("theorem2", ["--family", "dirichlet", "--q", "4", "--index", "1"]),
    ("sympower", ["--family", "delta", "--l", "2"]),
    ("grh", ["--family", "zeta"]),
    ("shortsum", ["--family", "zeta", "--x", "1000"]),
    ("lemma2", ["--family", "zeta", "--x", "50"]),
])
def test_bound_modes(capsys, mode, extra):
    code, out, _ = call(capsys, "bound", mode, *extra)
    assert code == 0
    assert json.loads(out)["results"]


def test_eval(capsys):
    code, out, _ = call(capsys, "eval", "--family", "zeta", "--sigma", "2")
    row = json.loads(out)["results"][0]
    assert row["L"]["re"] == pytest.approx(1.6449340668482264)
    assert row["log_derivative"]["re"] == pytest.approx(-0.5699609930945329, abs=1e-9)


@pytest.mark.parametrize("check", ["rankin", "chain", "maass"])
def test_verify_sweeps_pass(capsys, check):
    code, out, _ = call(capsys, "verify", check, "--seeds", "5")
    assert code == 0
    assert json.loads(out)["violations"] == []


@pytest.mark.parametrize("argv", [
    ["verify", "lemma1"], ["verify", "lemma5"], ["verify", "lemma2", "--qmax", "20"], ["verify", "monotone"],
])
def test_verify_analytic_checks_pass(capsys, argv):
    code, out, _ = call(capsys, *argv)
    assert code == 0, out


def test_verify_violation_exit_one(capsys, tmp_path):
    # a fake zero far from the critical line, with no tail allowance
    zeros = tmp_path / "fake.txt"
    zeros.write_text("0.95 0.3\n")
    consts = tmp_path / "c.txt"
    consts.write_text("C_tail = 0\n")
    code, out, _ = call(capsys, "verify", "lemma5", "--family", "zeta", "--sigma", "1.5", "--x", "1000",
                        "--zeros", str(zeros), "--constants", str(consts))
    doc = json.loads(out)
    assert code == 1
    assert len(doc["violations"]) == 1
    assert doc["violations"][0]["residual"] > 1e-2


def test_malformed_spec_exit_two(capsys, tmp_path):
    text = families.dumps_spec(families.zeta_spec(10)).replace('"q_mag": ', '"q_mag": "abc", "x": ')
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, out, err = call(capsys, "eval", "--spec", str(path))
    assert code == 2 and out == ""
    assert "q_mag" in err or "x" in err


def test_invalid_spec_names_field(capsys, tmp_path):
    text = families.dumps_spec(families.zeta_spec(10)).replace('"degree": 1', '"degree": "one"')
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = call(capsys, "eval", "--spec", str(path))
    assert code == 2 and "degree" in err


def test_spec_source_required_exactly_once(capsys, tmp_path):
    assert call(capsys, "eval")[0] == 2
    path = tmp_path / "s.json"
    families.save_spec(families.zeta_spec(10), path)
    assert call(capsys, "eval", "--family", "zeta", "--spec", str(path))[0] == 2


def test_bad_flags_exit_two(capsys):
    assert call(capsys, "bound", "nope", "--family", "zeta")[0] == 2
    assert call(capsys, "eval", "--family", "zeta", "--sigma", "a,b")[0] == 2
    assert call(capsys, "eval", "--family", "dirichlet")[0] == 2


def test_out_file_and_constants(capsys, tmp_path):
    cpath = tmp_path / "c.txt"
    cpath.write_text("C_abs = 2\n")
    out = tmp_path / "r.json"
    code, stdout, _ = call(capsys, "bound", "theorem1", "--family", "zeta", "--constants", str(cpath), "--out", str(out))
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["constants"]["C_abs"] == 2.0
    assert doc["constants_digest"] == bounds.load_constants(cpath).digest
    assert doc["results"]["components"]["constant_term"] == 2.0


def test_clamp_override(capsys):
    code, out, _ = call(capsys, "bound", "theorem2", "--family", "dirichlet", "--q", "10007", "--index", "1", "--clamp-x", "10")
    res = json.loads(out)["results"]
    assert res["flags"]["clamped"] and res["params"]["x"] == 10


@pytest.mark.parametrize("argv", [
    ["verify", "rankin", "--seeds", "16"],
    ["verify", "chain", "--seeds", "16"],
    ["verify", "lemma2", "--qmax", "25"],
    ["verify", "monotone"],
    ["corpus", "--qmax", "20"],
    ["corpus", "--qmax", "15", "--mode", "shortsum"],
])
def test_output_identical_across_jobs(capsys, argv):
    _, one, _ = call(capsys, *argv, "--jobs", "1")
    _, eight, _ = call(capsys, *argv, "--jobs", "8")
    assert one == eight


def test_lower(capsys):
    code, out, _ = call(capsys, "lower", "--family", "dirichlet", "--q", "4", "--index", "1", "--c0", "0.1", "--C0", "5",
                        "--clamp-x", "1e5")
    res = json.loads(out)["results"]
    assert code == 0
    assert 0 < res["lower_bound"] <= 0.7853981633974483
    assert res["flags"]["clamped"] and res["flags"]["heuristic"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lfedge", "bound", "theorem1", "--family", "zeta"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["mode"] == "theorem1"


def test_verify_rankin_thousand_seeds(capsys):
    code, out, _ = call(capsys, "verify", "rankin", "--seeds", "1000", "--jobs", "4")
    doc = json.loads(out)
    assert code == 0
    assert sum(r["checks"] for r in doc["results"]["seeds"]) == 1000 * 100 * 6
