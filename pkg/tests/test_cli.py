import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from planktonmap.cli import _apply_config, build_parser, main, read_config

RECIPES = Path(__file__).resolve().parents[1] / "recipes"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fixed_points_attracting_near_criticality(capsys):
    code, out, _ = run(capsys, "fixed-points", "--r", "0.5", "--c", "1", "--gamma", "1.775", "--h", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["positive"]["classification"] == "attracting"
    assert rep["positive"]["q"] == pytest.approx(0.9974, abs=1e-4)


def test_fixed_points_nonhyperbolic_origin(capsys):
    code, out, _ = run(capsys, "fixed-points", "--r", "2", "--c", "1", "--gamma", "0", "--h", "1")
    assert code == 0
    assert json.loads(out)["E0"]["classification"] == "nonhyperbolic"


def test_fixed_points_without_positive_point(capsys):
    _, out, _ = run(capsys, "fixed-points", "--r", "0.5", "--c", "1", "--gamma", "0.9", "--h", "1")
    rep = json.loads(out)
    assert "positive" not in rep and {"E0", "E1"} <= rep.keys()


def test_ns_report(capsys):
    code, out, _ = run(capsys, "ns", "--r", "0.8", "--c", "2", "--h", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["gamma0"] == pytest.approx(6.306663, abs=1e-6)
    assert rep["L"] < 0 and rep["direction"] == "attracting_curve_for_gamma_above"
    assert rep["L_fd"] == pytest.approx(rep["L"], rel=1e-3)
    assert rep["lambda_im"] > 0


def test_ns_without_critical_parameter(capsys):
    code, out, err = run(capsys, "ns", "--r", "0.5", "--c", "1", "--h", "2")
    assert code == 1 and out == "" and "no critical parameter" in err


def test_simulate_csv(capsys, tmp_path):
    target = tmp_path / "orbit.csv"
    code, _, _ = run(capsys, "simulate", "--r", "0.5", "--c", "1", "--gamma", "1.2", "--h", "1",
                     "--n", "50", "--out", str(target))
    assert code == 0
    data = rows(target.read_text())
    assert len(data) == 51 and data[0] == {"n": "0", "u": "0.34999999999999998", "v": "0.59999999999999998"}


def test_control_vertices(capsys):
    code, out, _ = run(capsys, "control", "--r", "0.5", "--c", "1", "--gamma", "2", "--h", "1")
    assert code == 0
    verts = [float(r[k]) for r in rows(out) if r["kind"] == "vertex" for k in ("s1", "s2")]
    assert verts == pytest.approx([-1 / 6, -1 / 4, 11 / 6, -1 / 4, 23 / 6, 15 / 4], abs=1e-9)


def test_control_grid(capsys):
    code, out, _ = run(capsys, "control", "--r", "0.5", "--c", "1", "--gamma", "2", "--h", "2", "--grid", "5")
    assert code == 0
    data = rows(out)
    assert len(data) == 25 and any(r["stable"] == "1" for r in data)


def test_control_needs_positive_point(capsys):
    code, _, err = run(capsys, "control", "--r", "0.5", "--c", "1", "--gamma", "0.5", "--h", "1")
    assert code == 1 and "positive fixed point" in err


def test_invariant_grid(capsys):
    code, out, _ = run(capsys, "invariant", "--set", "M1", "--r", "0.5", "--c", "0.4", "--gamma", "0.6",
                       "--h", "1", "--grid", "4", "--converge", "--max-iter", "20000")
    assert code == 0
    data = rows(out)
    assert set(data[0]) == {"u", "v", "inside", "stays", "converged", "iterations"}
    assert all(r["stays"] == "1" for r in data if r["inside"] == "1")


def test_invariant_rejects_inadmissible(capsys):
    code, _, _ = run(capsys, "invariant", "--set", "M2", "--r", "0.5", "--c", "0.4", "--gamma", "0.6", "--h", "1")
    assert code == 1


def test_mle_empty_range_is_validation_error(capsys):
    code, _, err = run(capsys, "mle", "--r", "0.5", "--c", "1", "--h", "1", "--gamma-min", "2", "--gamma-max", "2")
    assert code == 1 and "empty" in err


def test_region(capsys):
    code, out, _ = run(capsys, "region", "--h", "1", "--r-steps", "3", "--c-steps", "2")
    assert code == 0 and len(rows(out)) == 6


@pytest.mark.parametrize("argv", [
    ["fixed-points", "--r", "0.5", "--c", "1", "--gamma", "1", "--h", "1", "--bogus", "3"],
    ["fixed-points", "--r", "x"],
    ["fixed-points", "--r", "0.5", "--c", "1", "--gamma", "1", "--h", "3"],
    ["fixed-points", "--r", "-1", "--c", "1", "--gamma", "1", "--h", "1"],
    ["fixed-points", "--r", "0.5", "--c", "1", "--h", "1"],
    ["fixed-points", "--r", "nan", "--c", "1", "--gamma", "1", "--h", "1"],
    ["bifdiag", "--r", "0.5", "--c", "1", "--h", "1", "--threads", "0"],
    [],
])
def test_validation_errors_exit_one(capsys, argv):
    # argparse-level problems exit through SystemExit, later checks return the code
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    assert capsys.readouterr().err


def test_unwritable_output_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--r", "0.5", "--c", "1", "--gamma", "1.2", "--h", "1",
                       "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "I/O" in err


def test_help_lists_common_flags(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bifdiag", "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for flag in ("--r", "--c", "--h", "--seed", "--out", "--threads", "--config", "--gamma-min"):
        assert flag in out


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nr = 0.5\nc = 1\ngamma = 1.2\nh = 1\nn = 5\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 6
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--n", "2")
    assert code == 0 and len(rows(out)) == 3


@pytest.mark.parametrize("text", ["r = 0.5\nwhatever = 1\n", "r = abc\n", "no equals sign\n", "command = mle\n"])
def test_bad_config_is_validation_error(capsys, tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 1


def test_missing_config_exits_two(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", "--config", str(tmp_path / "nope.cfg"))
    assert code == 2


def test_identical_invocations_give_identical_bytes(capsys):
    argv = ["mle", "--r", "0.5", "--c", "1", "--h", "1", "--gamma-min", "1.5", "--gamma-max", "2.5",
            "--steps", "7", "--n", "500", "--seed", "3"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *(argv + ["--threads", "2"]))[1]
    assert first == second and first.startswith("gamma,mle\n")


@pytest.mark.parametrize("recipe", sorted(p.name for p in RECIPES.glob("*.cfg")))
def test_recipes_parse(recipe):
    path = str(RECIPES / recipe)
    argv = [read_config(path)["command"], "--config", path]
    parser = build_parser()
    args = _apply_config(parser, argv, parser.parse_args(argv))
    assert args.command == argv[0]
    assert args.h in (1, 2)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "planktonmap", "fixed-points", "--r", "0.5", "--c", "1",
                           "--gamma", "1.2", "--h", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["positive"]["classification"] == "attracting"
