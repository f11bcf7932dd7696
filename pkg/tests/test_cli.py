import json
import subprocess
import sys

import pytest

from kova.cli import main
from kova.report import validate

from conftest import SYSTEMS


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_report_validates(capsys):
    code, out, _ = run(["analyze", SYSTEMS / "lotka.kova", "--type", 1, 0], capsys)
    assert code == 0
    rep = json.loads(out)
    validate(rep)
    assert rep["grading"]["grading"]["weights"] == [1, 1, 1]
    assert len(rep["grading"]["balances"]) == 6


def test_output_is_deterministic(capsys):
    args = ["analyze", SYSTEMS / "oregonator.kova", "--type", 1, 0]
    first = run(args, capsys)[1]
    assert run(args, capsys)[1] == first


@pytest.mark.parametrize("cmd", ["balances", "kovalevskaya", "resonances", "search"])
def test_subcommands_validate(cmd, capsys):
    code, out, _ = run([cmd, SYSTEMS / "lotka.kova", "--type", 0, 0] if cmd in ("resonances", "search")
                       else [cmd, SYSTEMS / "lotka.kova"], capsys)
    assert code == 0
    validate(json.loads(out))


def test_fixed_point_resonances(capsys):
    code, out, _ = run(["resonances", SYSTEMS / "artificial.kova", "--type", 0, 0, "--k-max", 6,
                        "--float"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["fixed_point"]["spectrum"][1]["exact"] is False
    per = rep["resonances"][0]["per_degree"]
    assert [p["nontrivial"] for p in per] == [0] * 7


def test_verify(tmp_path, capsys):
    code, out, _ = run(["verify", SYSTEMS / "oregonator.kova", "--tensor",
                        SYSTEMS / "oreg_T.kova", "--out", tmp_path / "v.json"], capsys)
    assert code == 0 and out == ""
    rep = json.loads((tmp_path / "v.json").read_text())
    validate(rep)
    assert rep["verification"]["numeric_invariant"] and rep["verification"]["symbolic_invariant"]


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.kova"
    bad.write_text("x' = x/y\ny' = y\n")
    code, _, err = run(["analyze", bad], capsys)
    assert code == 2 and "non-polynomial" in err
    off = tmp_path / "off.kova"
    off.write_text("x' = 1 + x^2\n")
    assert run(["analyze", off, "--fixed-point"], capsys)[0] == 3
    with pytest.raises(SystemExit) as e:
        main(["analyze"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate", "x"])
    assert e.value.code == 1
    assert run(["analyze", tmp_path / "missing.kova"], capsys)[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "kova", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "kova" in r.stdout
