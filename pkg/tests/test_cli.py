"""Command line, scenario files, report format and exit codes."""

import json
import subprocess
import sys

import pytest

from supmech import cli
from supmech.anchors import ANCHORS
from supmech.report import VerificationReport, emit_report
from supmech.suites import SUITES, SchemaError, run_suite


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_algebra_counts(capsys):
    code, out, _ = run(["verify-algebra", "--preset", "galilei"], capsys)
    d = json.loads(out)
    assert code == 0 and d["status"] == "pass"
    assert d["results"]["groups"] == {"pb-table": 55, "casimir": 22}
    assert all(e["residual"] == "0" and e["tolerance"] == "exact" for e in d["entries"])


def test_verify_algebra_intermediate_flag(capsys):
    _, out, _ = run(["verify-algebra", "--intermediate", "true"], capsys)
    assert json.loads(out)["results"]["groups"]["casimir-intermediate"] == 30


def test_verify_algebra_presentation_file(tmp_path, capsys):
    f = tmp_path / "ccr1.pres"
    f.write_text("name ccr1\neven X P\n[X, P] = i*hbar*I\n")
    code, out, _ = run(["verify-algebra", "--preset", f], capsys)
    assert code == 0 and json.loads(out)["results"]["generators"] == ["X", "P"]
    f.write_text("even X P\n[X, P] = X*X\n")
    code, _, err = run(["verify-algebra", "--preset", f], capsys)
    assert code == 2 and "Lie-type" in err


def test_gns_example(capsys):
    code, out, _ = run(["gns", "--algebra", "mat:2", "--state", "e11"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["results"]["dim"] == 2 and d["results"]["irreducible"] is True
    (rec,) = [e for e in d["entries"] if e["id"] == "reconstruction"]
    assert rec["residual"] < 1e-12


def test_gns_superselection(capsys):
    code, out, _ = run(["gns", "--algebra", "sum:2,3", "--state", "trace", "--sectors", "block:1,block:2"], capsys)
    d = json.loads(out)
    assert code == 0 and d["results"]["sectors"] == [3, 2]


def test_failing_check_exit_1(capsys):
    code, out, err = run(["gns", "--tol", "-1"], capsys)
    d = json.loads(out)
    assert code == 1 and d["status"] == "fail"
    (bad,) = [e for e in d["entries"] if e["status"] == "fail"]
    assert bad["anchor"] == ANCHORS["gns.reconstruction"]
    assert isinstance(bad["residual"], float)
    assert "FAIL reconstruction" in err


def test_text_format(capsys):
    code, out, _ = run(["noether", "--format", "text"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("suite: noether")
    rows = lines[3:]
    assert len(rows) == 11
    # columns line up: status always starts at the same offset
    offsets = {r.index(" pass ") for r in rows}
    assert len(offsets) == 1


def test_outputs_written(tmp_path, capsys):
    code, _, _ = run(["--out", tmp_path, "evolve"], capsys)
    assert code == 0
    assert json.loads((tmp_path / "report.json").read_text())["schema_version"] == "1.0"
    assert (tmp_path / "psi.csv").read_text().startswith("x,re_psi,im_psi\n")
    code, _, _ = run(["star", "--out", tmp_path / "s"], capsys)
    fit = json.loads((tmp_path / "s" / "scaling.json").read_text())
    assert {"slope", "intercept", "residuals"} <= set(fit)


def test_empty_config_exit_2(tmp_path, capsys):
    f = tmp_path / "empty.ini"
    f.write_text("")
    code, _, err = run(["--config", f], capsys)
    assert code == 2 and "empty scenario" in err


@pytest.mark.parametrize(
    "text,needle",
    [
        ("[gns]\nbogus = 1\n", "unknown keys ['bogus']"),
        ("[nosuch]\n", "unknown suite"),
        ("[gns]\nalgebra = sum:2,3\nstate = random\n", "needs a 'seed'"),
        ("[evolve]\nN = 100\n", "power of two"),
        ("[gns\n", "gns"),
        ('{"gns": 3}', "must be an object"),
        ('{"suites": [{"algebra": "mat:2"}]}', "'suite' key"),
        ("[gns]\nalgebra = mat:x\n", "mat:x"),
    ],
)
def test_schema_violations_exit_2(tmp_path, capsys, text, needle):
    f = tmp_path / "scenario.ini"
    f.write_text(text)
    code, _, err = run(["--config", f], capsys)
    assert code == 2 and needle in err


def test_bad_flag_exit_2(capsys):
    code, _, _ = run(["gns", "--colour", "red"], capsys)
    assert code == 2


def test_missing_config_exit_3(tmp_path, capsys):
    code, _, err = run(["--config", tmp_path / "absent.ini"], capsys)
    assert code == 3 and "I/O error" in err


def test_unwritable_output_exit_3(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(["--out", blocker / "sub", "noether"], capsys)
    assert code == 3


SCENARIO = """
[gns:sectors]
algebra = sum:2,3
state = random
sectors = pure:1,pure:2
seed = 7

[grassmann-cc]
n = 3
seed = 1

[weyl-check]
"""


def _strip_timing(path):
    d = json.loads(path.read_text())
    d.pop("timing")
    return d


def test_scenario_is_deterministic_and_parallel_safe(tmp_path, capsys):
    f = tmp_path / "s.ini"
    f.write_text(SCENARIO)
    assert run(["--config", f, "--out", tmp_path / "a"], capsys)[0] == 0
    assert run(["--config", f, "--out", tmp_path / "b", "--jobs", "3"], capsys)[0] == 0
    a, b = _strip_timing(tmp_path / "a" / "report.json"), _strip_timing(tmp_path / "b" / "report.json")
    assert a == b
    assert sorted(a["results"]) == ["gns:sectors", "grassmann-cc", "weyl-check"]
    assert a["results"]["gns:sectors"]["sectors"] == [3, 2]


def test_json_scenario_and_cli_override(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"suites": [{"suite": "gns", "algebra": "mat:3", "state": "trace"}]}))
    code, out, _ = run(["--config", f], capsys)
    assert code == 0 and json.loads(out)["results"]["dim"] == 9
    code, out, _ = run(["--config", f, "gns", "--state", "e11"], capsys)
    assert json.loads(out)["results"]["dim"] == 3


def test_seed_flag_recorded(capsys):
    _, out, _ = run(["--seed", "11", "grassmann-cc", "--samples", "20"], capsys)
    assert json.loads(out)["results"]["params"]["seed"] == 11


def test_nothing_to_run(capsys):
    assert run([], capsys)[0] == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "supmech", "weyl-check", "--format", "text"],
        capture_output=True,
        text=True,
        cwd=tmp_path,
    )
    assert proc.returncode == 0 and "weyl-check" in proc.stdout


# -- report and suite plumbing -----------------------------------------------------


def test_every_suite_entry_carries_a_registered_anchor():
    anchors = set(ANCHORS.values())
    for name in ("verify-algebra", "noether", "weyl-check", "wigner"):
        rep = run_suite(name)
        assert rep.entries and all(e.anchor in anchors for e in rep.entries)


def test_unknown_anchor_key_is_a_bug():
    with pytest.raises(KeyError):
        VerificationReport("x").add_flag("a", "no.such.key", True)


def test_emit_report_formats():
    rep = VerificationReport("demo")
    rep.add_numeric("r", "gns.reconstruction", 1e-3, 1e-6)
    d = json.loads(emit_report(rep.finish(), "json"))
    assert d["status"] == "fail" and d["counts"] == {"total": 1, "passed": 0, "failed": 1}
    assert d["entries"][0]["anchor"] == ANCHORS["gns.reconstruction"]
    with pytest.raises(ValueError):
        emit_report(rep, "yaml")


def test_schema_validation_direct():
    with pytest.raises(SchemaError):
        SUITES["wigner"].validate({"N": "abc"})
    assert SUITES["wigner"].validate({})["N"] == 128
