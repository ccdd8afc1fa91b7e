import io
import json
import subprocess
import sys

import pytest

from logkfl.abelian import FgAbGroup
from logkfl.cli import run
from logkfl.coefficients import SymbolicModule, parse_module


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def machine(*argv, stdin=""):
    code, out, err = call(*argv, "--format", "machine", stdin=stdin)
    assert code == 0, err
    return json.loads(out)


def test_snf_example():
    code, out, _ = call("snf", "--matrix", "[[2,4],[6,8]]")
    assert code == 0 and "D = diag(2, 4)" in out and "U = " in out and "V = " in out
    d = machine("snf", "--matrix", "[[2,4],[6,8]]")
    assert d["diagonal"] == [2, 4]
    U, V, D = d["U"], d["V"], d["D"]
    A = [[2, 4], [6, 8]]
    mul = lambda X, Y: [[sum(X[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert mul(mul(U, A), V) == D


def test_calc_dvr_example():
    d = machine("calc-dvr", "--q", "2", "--sheaf", "lattice:1", "--mode", "paper")
    mods = [SymbolicModule.from_list(e["module"]) for e in d["degrees"]]
    assert mods[:4] == [parse_module("Z"), parse_module("0"), parse_module("Q/Z"), parse_module("0")]
    assert d["mode"] == "paper" and d["diagnostics"] == []


def test_cohomology_example():
    d = machine("cohomology", "--group", "Z/2", "--coeff", "Z/2", "--degree", "1")
    assert FgAbGroup.from_dict(d["group"]) == FgAbGroup.cyclic(2)


def test_discrepancy_in_machine_output():
    d = machine("calc-dvr", "--q", "7", "--sheaf", "finite:3:Z/3")
    assert "extension" in d["degrees"][1]
    assert [x["degree"] for x in d["diagnostics"]] == [1, 2]


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    (),
    ("snf", "--matrix", "[[1,2],[3]]"),
    ("snf", "--bogus", "1"),
    ("group", "--group", "Z/x"),
    ("calc-dvr", "--q", "6", "--sheaf", "lattice:1"),
    ("calc-dvr", "--q", "7", "--sheaf", "lattice:1", "--mode", "other"),
    ("calc-dedekind", "--points", "[[2, null]]", "--sheaf", "lattice:1"),
    ("direct-image", "--p", "3", "--sheaf", "finite:2:Z/6", "--degree", "1"),
    ("zhat", "--module", "Z(-1)", "--q", "5"),
])
def test_invalid_input_exits_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and err


def test_limits_exit_3():
    code, _, err = call("cech", "--rank", "2", "--p", "5", "--n", "6", "--degree", "3")
    assert code == 3 and "SizeBound" in err
    code, _, err = call("profinite", "--rank", "1", "--p", "3", "--coeff", "Z/4", "--ladder", "[2,4,8]")
    assert code == 3 and "NotStabilized" in err


def test_size_bound_flag_and_env(monkeypatch):
    code, _, _ = call("cohomology", "--group", "Z/4", "--degree", "4", "--size-bound", "100")
    assert code == 3
    monkeypatch.setenv("LOGKFL_SIZE_BOUND", "100")
    assert call("cohomology", "--group", "Z/4", "--degree", "4")[0] == 3
    assert call("cohomology", "--group", "Z/4", "--degree", "4", "--size-bound", "2000")[0] == 0


INVOCATIONS = [
    ("snf", "--matrix", "[[3,0,1],[0,6,2]]"),
    ("group", "--group", "Z + Z/4 + Z/6"),
    ("group", "--relations", "[[2,0],[0,3]]"),
    ("cohomology", "--group", "Z/2 x Z/2", "--coeff", "Z/2", "--degree", "2"),
    ("cyclic-closed", "--m", "4", "--coeff", "Z/6", "--degree", "2"),
    ("profinite", "--rank", "2", "--p", "3", "--coeff", "Z/2", "--degree", "2"),
    ("cech", "--rank", "1", "--p", "2", "--n", "6", "--coeff", "Z", "--degree", "2"),
    ("cech", "--rank", "2", "--p", "3", "--n", "4", "--coeff", "Q", "--degree", "2"),
    ("cech-colimit", "--rank", "1", "--p", "3", "--coeff", "Z/4", "--degree", "1"),
    ("direct-image", "--p", "3", "--q", "9", "--sheaf", "lattice:1", "--degree", "2"),
    ("direct-image", "--points", "[[2,4],[3,3]]", "--sheaf", "finite:5:Z/5", "--degree", "1"),
    ("zhat", "--module", "Q_3/Z_3(-1)", "--q", "7"),
    ("zhat", "--module", "Z/3 + Z/3", "--q", "4", "--frobenius", "[[0,1],[1,0]]"),
    ("calc-dvr", "--q", "2", "--sheaf", "Z/9"),
    ("calc-dedekind", "--points", "[[2,4]]", "--sheaf", "finite:3:Z/3"),
    ("calc-dedekind", "--points", "[[2,2],[3,3]]", "--sheaf", "lattice:2", "--mode", "paper"),
]


@pytest.mark.parametrize("argv", INVOCATIONS, ids=lambda a: a[0])
def test_determinism_and_round_trip(argv):
    code1, out1, _ = call(*argv, "--format", "machine")
    code2, out2, _ = call(*argv, "--format", "machine")
    assert code1 == code2 == 0 and out1 == out2
    data = json.loads(out1)
    assert json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n" == out1
    # every group or module record decodes under its schema
    for rec in _records(data):
        if "torsion" in rec:
            FgAbGroup.from_dict(rec)
        else:
            SymbolicModule.from_list([rec])
    code, human, _ = call(*argv)
    assert code == 0 and human.strip()


def _records(d):
    if isinstance(d, dict):
        if "torsion" in d and "rank" in d or "kind" in d and "twist" in d:
            yield d
        else:
            for v in d.values():
                yield from _records(v)
    elif isinstance(d, list):
        for v in d:
            yield from _records(v)


def test_input_document(tmp_path):
    doc = {"q": 7, "sheaf": "finite:3:Z/3", "mode": "paper"}
    path = tmp_path / "job.json"
    path.write_text(json.dumps(doc))
    a = machine("calc-dvr", "--input", str(path))
    b = machine("calc-dvr", "--input", "-", stdin=json.dumps(doc))
    c = machine("calc-dvr", "--q", "7", "--sheaf", "finite:3:Z/3", "--mode", "paper")
    assert a == b == c
    assert call("calc-dvr", "--input", "-", stdin='{"nope": 1}')[0] == 2
    assert call("calc-dvr", "--input", "-", stdin="[1]")[0] == 2
    assert call("calc-dvr", "--input", "-", stdin="{")[0] == 2


def test_verify_exits_zero():
    code, out, _ = call("verify")
    assert code == 0
    d = machine("verify", "--suite", "calculators")
    assert d["ok"]


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "logkfl.cli", "cyclic-closed", "--m", "2",
                           "--coeff", "Z", "--degree", "2", "--format", "machine"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert FgAbGroup.from_dict(json.loads(proc.stdout)["group"]) == FgAbGroup.cyclic(2)
