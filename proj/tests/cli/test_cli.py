"""End-to-end tests for the pmi command-line tool.

The binary path comes from the PMI_BIN environment variable (set by ctest).
"""

import json
import math
import os
import subprocess

import pytest

BIN = os.environ.get("PMI_BIN", "pmi")
ROOT = os.path.join(os.path.dirname(__file__), "..", "..")
EX1 = os.path.join(ROOT, "problems", "ex1.json")
INTERVAL = os.path.join(ROOT, "problems", "interval.json")
INFEASIBLE = os.path.join(ROOT, "problems", "infeasible.json")
TRACE_MIX = os.path.join(ROOT, "problems", "trace_mix.json")


def run(*args, expect=0):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    assert proc.returncode == expect, f"{args}: rc={proc.returncode}\n{proc.stdout}{proc.stderr}"
    return proc


def test_solve_logdet_json():
    proc = run("solve", "--problem", EX1, "--rep", "logdet", "--seed", "7", "--newton", "--json")
    doc = json.loads(proc.stdout)
    assert doc["rep"] == "logdet"
    assert doc["feasible"] is True
    assert abs(doc["best_value"] + 1.0) < 1e-2
    assert math.hypot(doc["best_point"][0], doc["best_point"][1] + 1.0) < 5e-2


def test_solve_is_deterministic():
    args = ("solve", "--problem", EX1, "--rep", "logdet", "--seed", "3", "--newton", "--json")
    a = run(*args).stdout
    b = run(*args).stdout
    assert a == b


def test_solve_kind_mismatch_exits_1():
    proc = run("solve", "--problem", EX1, "--rep", "factorization", expect=1)
    assert proc.stderr.splitlines()[0] == "E_KIND_MISMATCH"


def test_solve_unknown_rep_exits_1():
    proc = run("solve", "--problem", EX1, "--rep", "sos", expect=1)
    assert proc.stderr.splitlines()[0] == "E_REP"


def test_solve_infeasible_exits_2():
    proc = run("solve", "--problem", INFEASIBLE, "--rep", "bound", "--json", expect=2)
    doc = json.loads(proc.stdout)
    assert doc["status"] == "no_feasible_point"


def test_solve_factorization():
    proc = run("solve", "--problem", TRACE_MIX, "--rep", "factorization", "--rank", "1",
               "--seed", "4", "--json")
    doc = json.loads(proc.stdout)
    assert doc["certified"] is True
    assert abs(doc["best_value"]) < 1e-8


def test_solve_rep_all_comparison():
    proc = run("solve", "--problem", INTERVAL, "--rep", "all", "--seed", "2", "--newton",
               "--json")
    docs = json.loads(proc.stdout)
    assert [d["rep"] for d in docs] == ["charpoly", "logdet", "detr", "bound"]
    by_rep = {d["rep"]: d for d in docs}
    assert abs(by_rep["logdet"]["best_value"] + 1.0) < 1e-2
    assert abs(by_rep["bound"]["best_value"] + 1.0) < 5e-3


def test_trajectory_csv(tmp_path):
    out = tmp_path / "traj.csv"
    run("solve", "--problem", INTERVAL, "--rep", "logdet", "--newton", "--out", str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "stage,weight,iter,value,grad_norm,y"
    assert len(lines) > 2


def test_charpoly_prints_coefficients():
    proc = run("charpoly", "--problem", EX1)
    assert "q1 = 2 - x^2 - 16*x*y - y^2" in proc.stdout
    assert "q2 = 1 - 2*x^2 - 16*x*y - y^2 + 16*x^3*y + 16*x*y^3" in proc.stdout

    at = run("charpoly", "--problem", EX1, "--at", "0,-1")
    values = [line.split("->")[1].strip() for line in at.stdout.splitlines()]
    assert float(values[0]) == pytest.approx(1.0)
    assert float(values[1]) == pytest.approx(0.0)


def test_charpoly_constant_identity(tmp_path):
    doc = {
        "kind": "pmi",
        "vars": [{"name": "y", "block": "y"}],
        "objective": [{"coef": 1.0, "exps": [1]}],
        "matrix": {
            "dim": 2,
            "entries": [[{"coef": 1.0, "exps": [0]}], [], [{"coef": 1.0, "exps": [0]}]],
        },
    }
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(doc))
    proc = run("charpoly", "--problem", str(path))
    assert proc.stdout.splitlines() == ["q1 = 2", "q2 = 1"]


def test_oracle_json_and_exit_codes():
    proc = run("oracle", "--problem", EX1, "--h", "0.01", "--box", "-1.2:1.2,-1.2:1.2",
               "--json")
    doc = json.loads(proc.stdout)
    assert doc["best_value"] == pytest.approx(-1.0, abs=2e-2)
    assert doc["feasible_count"] > 0

    empty = run("oracle", "--problem", INFEASIBLE, "--h", "0.01", "--json", expect=2)
    doc = json.loads(empty.stdout)
    assert doc["best_point"] is None
    assert doc["feasible_count"] == 0


def test_classify_labels():
    assert run("classify", "(+ (* x x) 1)").stdout.strip() == "SEMIALG"
    assert run("classify", "(exp x)").stdout.strip() == "EXP"
    assert run("classify", "(sin (recip x) :domain (0,1])").stdout.strip() == "NOT_DEFINABLE_HERE"
    assert run("classify", "(sin x :domain [0 12.6])", "--var",
               "x=[0,12.6]").stdout.strip() == "AN"
    proc = run("classify", "(unknown x)", expect=1)
    assert proc.stderr.splitlines()[0] == "E_INPUT"


def test_bad_problem_file_exits_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "pmi"}')
    proc = run("solve", "--problem", str(bad), "--rep", "logdet", expect=1)
    assert proc.stderr.splitlines()[0] == "E_INPUT"
