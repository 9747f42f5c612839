import json
import subprocess
import sys

import pytest

from doublegroth.cli import main
from doublegroth.coeffring import Context, series_from_terms_json
from doublegroth.genfun import gt_coeff


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gx_single_box_matches_gtcoeff(capsys):
    code, out, _ = run(capsys, "gx", "--k", "0", "--type", "C", "--partition", "1", "--degree", "3", "--num-x", "2", "--num-b", "2")
    assert code == 0
    data = json.loads(out)
    ctx = Context.from_json(data["context"])
    assert ctx == Context(3, 2, 0, 2)
    assert series_from_terms_json(ctx, data["terms"]) == gt_coeff(1, 0, 0, "C", ctx)


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "2", "--k", "1")
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 4 and data["partitions"] == ["", "1", "2", "3"]


def test_localize_then_gkm_check(capsys, tmp_path):
    table = tmp_path / "t.json"
    code, _, _ = run(capsys, "localize", "--n", "3", "--k", "1", "--partition", "2,1", "--type", "B", "--out", str(table))
    assert code == 0
    code, out, _ = run(capsys, "gkm-check", str(table))
    assert code == 0
    assert json.loads(out)["violations"] == []


def test_gkm_check_reports_violations(capsys, tmp_path):
    table = tmp_path / "t.json"
    run(capsys, "localize", "--n", "2", "--k", "0", "--partition", "1", "--out", str(table))
    data = json.loads(table.read_text())
    data["entries"][-1]["value"].append({"coeff": "1/1", "beta": 0, "vars": {}})
    table.write_text(json.dumps(data))
    code, out, _ = run(capsys, "gkm-check", str(table), "--format", "text")
    assert code == 1
    assert "violations" in out


def test_expand_and_kernel(capsys):
    code, out, _ = run(capsys, "expand", "--k", "0", "--type", "B", "--partition", "2,1", "--degree", "4", "--num-x", "3", "--ab-zero", "--format", "text")
    assert code == 0
    assert out.splitlines() == ["2,1: 1", "remainder: 0"]
    code, out, _ = run(capsys, "expand", "--k", "1", "--partition", "1", "--degree", "3", "--num-x", "2")
    assert code == 0 and json.loads(out)["basis"] == "GQ"
    code, out, _ = run(capsys, "kernel", "1", "2", "2", "0", "0", "--format", "text")
    assert code == 0
    assert out.splitlines()[:2] == ["f[0,0] = 1", "f[1,-1] = -2"]


def test_gtcoeff_and_gp(capsys):
    code, out, _ = run(capsys, "gtcoeff", "--m", "-2", "--degree", "3", "--format", "text")
    assert code == 0 and out.strip() == "B^2"
    code, out, _ = run(capsys, "gp", "--partition", "1", "--num-x", "2", "--degree", "2", "--format", "text")
    assert code == 0 and out.strip() == "x1 + x2 + B*x1*x2"


@pytest.mark.parametrize(
    "argv",
    [
        ["gx", "--partition", "2,2"],
        ["gx", "--partition", "2,1", "--k", "1", "--num-b", "0"],
        ["gtcoeff"],
        ["enumerate"],
        ["kernel", "2", "1", "2", "0", "0"],
        ["nonsense"],
        ["gx", "--k", "2", "--num-a", "1", "--partition", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_gkm_check_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "gkm-check", str(tmp_path / "missing.json"))
    assert code == 2


def test_output_is_deterministic(tmp_path):
    argv = [sys.executable, "-m", "doublegroth", "localize", "--n", "2", "--k", "1", "--partition", "2", "--type", "C"]
    first = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, text=True, check=True, env={"GROTH_THREADS": "3", "PATH": ""}).stdout
    assert first == second
