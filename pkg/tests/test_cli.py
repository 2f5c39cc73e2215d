import json
import math

import pytest

from oustrichartz.cli import COMMANDS, build_parser, main


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.mark.parametrize("n", [1, 2])
def test_verify_kernels_passes(tmp_path, n):
    code, rep = run(["verify-kernels", "--n", str(n)], tmp_path)
    assert code == 0 and rep["passed"]
    names = {c["name"] for c in rep["checks"]}
    assert {"conjugation", "pi_shift", "kernel_unitarity", "profile_even"} <= names


def test_report_layout(tmp_path):
    code, rep = run(["schatten"], tmp_path)
    assert code == 0
    assert set(rep) >= {"command", "anchor", "version", "config", "config_hash", "grid", "checks", "passed"}
    assert rep["anchor"] == COMMANDS["schatten"][1]


def test_invalid_config_exits_two(tmp_path, capsys):
    assert main(["verify-kernels", "--eps-t", "0"]) == 2
    assert "configuration error" in capsys.readouterr().err
    assert main(["strichartz", "--n", "2", "--q", "4"]) == 2
    assert main(["strichartz", "--p", "3", "--q", "5"]) == 2


def test_failed_check_exits_one(tmp_path, capsys):
    code, rep = run(["series"], tmp_path)
    assert code == 1 and not rep["passed"]
    assert "check failed" in capsys.readouterr().err
    code, rep = run(["series", "--z-re", "-0.25"], tmp_path, "b.json")
    assert code == 0


def test_strichartz_endpoint(tmp_path):
    code, rep = run(["strichartz", "--p", "inf", "--q", "1"], tmp_path)
    assert code == 0
    assert all(math.isclose(r["ratio"], 1.0, rel_tol=1e-10) for r in rep["results"]["flat"])


def test_optimality_presets(tmp_path):
    for preset in ("small", "medium", "large"):
        code, rep = run(["optimality", "--preset", preset], tmp_path, f"{preset}.json")
        assert code == 0 and rep["results"]["scan"]["passed"]


def test_duality_and_csv(tmp_path):
    csv_path = tmp_path / "d.csv"
    code, rep = run(["duality", "--csv", str(csv_path)], tmp_path)
    assert code == 0 and rep["results"]["violations"] == 0
    assert csv_path.read_text().splitlines()[0].startswith("trial,")


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 4\ndegree = 6\n")
    code, rep = run(["schatten", "--config", str(cfg), "--seed", "9"], tmp_path)
    assert code == 0
    assert rep["config"]["seed"] == 9 and rep["config"]["degree"] == 6


def test_help_carries_anchor(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["duality", "--help"])
    assert "Duality principle" in capsys.readouterr().out


def test_stdout_when_no_out(capsys):
    assert main(["schatten", "--degree", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "schatten"
