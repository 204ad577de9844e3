import subprocess
import sys

import pytest

from crossnoma.cli import main
from crossnoma.sweeps import read_table


def test_analytic_command(capsys):
    assert main(["analytic"]) == 0
    out = capsys.readouterr().out
    assert "noma d1" in out and "analytic-exact" in out


def test_analytic_both_kernels_and_schemes(capsys):
    assert main(["analytic", "--kernel", "both", "--scheme", "both"]) == 0
    out = capsys.readouterr().out
    assert "analytic-paper" in out and "oma" in out


def test_analytic_with_config_and_out(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("rate1 = 1.2\n")  # infeasible strong-flow rate
    out = tmp_path / "table.csv"
    assert main(["analytic", "--config", str(cfg), "--out", str(out)]) == 0
    _, rows = read_table(out)
    assert all(row["probability"] == 1.0 for row in rows)


def test_simulate_command(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--trials", "300", "--seed", "5", "--out", str(out)]) == 0
    header, rows = read_table(out)
    assert header["trials"] == "300"
    assert len(rows) == 2
    assert all(0.0 <= row["probability"] <= 1.0 for row in rows)


def test_compare_command(capsys):
    assert main(["compare", "--trials", "400"]) == 0
    out = capsys.readouterr().out
    assert "z(exact)" in out and "gap(paper-exact)" in out


def test_sweep_figure_writes_csv_and_plot(tmp_path):
    out = tmp_path / "fig3.csv"
    code = main(
        ["sweep", "--figure", "3", "--trials", "60", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    assert out.exists()
    assert out.with_suffix(".png").exists()
    header, rows = read_table(out)
    assert header["sweep_variable"] == "lambda_common"
    assert {row["scenario"] for row in rows} == {"mixed", "los", "nlos"}


def test_sweep_no_plot(tmp_path):
    out = tmp_path / "fig2.csv"
    code = main(
        [
            "sweep", "--figure", "2", "--trials", "40", "--seed", "1",
            "--out", str(out), "--no-plot",
        ]
    )
    assert code == 0
    assert out.exists() and not out.with_suffix(".png").exists()


def test_sweep_spec_file(tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text(
        "variable = lambda_common\ngrid = 1e-4, 1e-3\nsources = analytic-exact\n"
    )
    out = tmp_path / "custom.csv"
    assert main(["sweep", "--spec", str(spec), "--out", str(out), "--no-plot"]) == 0
    _, rows = read_table(out)
    assert len(rows) == 4


def test_sweep_needs_exactly_one_selector(tmp_path):
    assert main(["sweep"]) == 2
    spec = tmp_path / "spec.txt"
    spec.write_text("variable = lambda_common\ngrid = 1e-4\n")
    assert main(["sweep", "--figure", "3", "--spec", str(spec)]) == 2


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("a1 = 0.6\na2 = 0.6\n")
    assert main(["analytic", "--config", str(bad)]) == 2


def test_bad_trials_exit_code():
    assert main(["simulate", "--trials", "0"]) == 2


def test_window_override(tmp_path, capsys):
    out = tmp_path / "narrow.csv"
    assert main(
        ["simulate", "--trials", "100", "--window", "2000", "--out", str(out)]
    ) == 0
    header, _ = read_table(out)
    assert header["window"] == "2000"


def test_validate_command(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "crossnoma.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "sweep" in result.stdout
