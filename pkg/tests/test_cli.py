"""Scenario runner: config parsing, subcommands, exit codes, CSV contracts."""

import csv

import pytest

from fdigrowth.cli import main

TRAP_CONFIG = """\
[parameters]
alpha = 0.5
alpha_h = 0.5
alpha_e = 0.5
sigma = 0.6
beta = 0.96
A_c = 1.0
A_h = 1.0
A_e = 2.0
a = 1.0
b = 0.5
x_bar = 2.0
p = 1.0
p_n = 1.0
utility = log
X_0 = 1.0

[grid]
x_lo = 1e-3
x_hi = 5.0
n = 400

[run]
T = 200
tol = 1e-8

[output]
directory = {out}
"""

GROWTH_OVERRIDES = {"a": "50.0", "b": "20.0"}


def write_config(tmp_path, name="scenario.ini", text=None, **overrides):
    text = TRAP_CONFIG if text is None else text
    body = text.format(out=tmp_path / "out")
    for key, value in overrides.items():
        lines = []
        for line in body.splitlines():
            if line.split("=")[0].strip() == key:
                lines.append(f"{key} = {value}")
            else:
                lines.append(line)
        body = "\n".join(lines)
    path = tmp_path / name
    path.write_text(body + "\n")
    return path


def parse_kv(out: str) -> dict:
    pairs = {}
    for line in out.splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            pairs[k] = v
    return pairs


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        cfg.write_text(cfg.read_text() + "\nmystery = 1\n")
        assert main(["steady", "--config", str(cfg)]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_missing_key_rejected(self, tmp_path, capsys):
        body = TRAP_CONFIG.format(out=tmp_path).replace("beta = 0.96\n", "")
        cfg = tmp_path / "broken.ini"
        cfg.write_text(body)
        assert main(["steady", "--config", str(cfg)]) == 2
        assert "beta" in capsys.readouterr().err

    def test_bad_number_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, alpha="lots")
        assert main(["steady", "--config", str(cfg)]) == 2
        assert "alpha" in capsys.readouterr().err

    def test_theta_with_log_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        cfg.write_text(cfg.read_text().replace(
            "utility = log", "utility = log\ntheta = 2.0"))
        assert main(["steady", "--config", str(cfg)]) == 2
        assert "theta" in capsys.readouterr().err

    def test_assumption_violation_named(self, tmp_path, capsys):
        cfg = write_config(tmp_path, a="0.4")
        assert main(["steady", "--config", str(cfg)]) == 2
        assert "a*x_bar" in capsys.readouterr().err

    def test_missing_config_flag_is_usage_error(self, capsys):
        assert main(["steady"]) == 2
        assert "usage-error" in capsys.readouterr().err


class TestTech:
    def test_trap_g_equals_f(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["tech", "--config", str(cfg), "--s-min", "0.5",
                     "--s-max", "2", "--s-points", "3"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "out" / "tech.csv")))
        assert [r["S"] for r in rows] == ["0.5", "1", "2"]
        for r in rows:
            assert r["G"] == r["F"]
            assert r["regime"] == "NoRD"
            assert r["G0"] == ""     # infeasible below the minimum R&D spend

    def test_growth_regime_flips_once(self, tmp_path):
        cfg = write_config(tmp_path, **GROWTH_OVERRIDES)
        assert main(["tech", "--config", str(cfg), "--s-min", "0.005",
                     "--s-max", "0.1", "--s-points", "40"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "out" / "tech.csv")))
        regimes = [r["regime"] for r in rows]
        flips = sum(1 for a, b in zip(regimes, regimes[1:]) if a != b)
        assert flips == 1
        assert regimes[0] == "NoRD" and regimes[-1] == "RD"

    def test_empty_range_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["tech", "--config", str(cfg), "--s-min", "1",
                     "--s-max", "2", "--s-points", "0"]) == 2
        assert main(["tech", "--config", str(cfg), "--s-min", "3",
                     "--s-max", "2", "--s-points", "5"]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path)
        args = ["tech", "--config", str(cfg), "--s-min", "0.1",
                "--s-max", "4", "--s-points", "7"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "tech.csv").read_bytes() \
            == (tmp_path / "b" / "tech.csv").read_bytes()


class TestSteady:
    def test_trap_report_values(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["steady", "--config", str(cfg)]) == 0
        kv = parse_kv(capsys.readouterr().out)
        assert float(kv["S_a"]) == pytest.approx(0.2304, abs=1e-4)
        assert float(kv["S_b"]) == pytest.approx(0.4608, abs=1e-4)
        assert float(kv["x_star"]) == pytest.approx(2.0, abs=1e-4)
        assert kv["regime"] == "Trap"

    def test_growth_report_includes_threshold(self, tmp_path, capsys):
        cfg = write_config(tmp_path, **GROWTH_OVERRIDES)
        assert main(["steady", "--config", str(cfg)]) == 0
        kv = parse_kv(capsys.readouterr().out)
        assert kv["regime"] == "SustainedGrowth"
        assert float(kv["S_star"]) > 0
        assert float(kv["Gamma"]) > 1
        assert kv["growth_cond"] == "true"
        assert "cond.growth_marginal_product" in "".join(kv)


class TestSolveSimulate:
    def test_solve_writes_policy(self, tmp_path, capsys):
        cfg = write_config(tmp_path, n="200")
        assert main(["solve", "--config", str(cfg)]) == 0
        rows = list(csv.DictReader(open(tmp_path / "out" / "value_policy.csv")))
        assert len(rows) == 200
        assert set(rows[0]) == {"X", "V", "S_next", "c", "truncated"}

    def test_trap_simulation(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["simulate", "--config", str(cfg)]) == 0
        kv = parse_kv(capsys.readouterr().out)
        assert kv["takeoff"] == "none"
        assert float(kv["S_final"]) == pytest.approx(0.4608, abs=1e-3)
        assert kv["check.monotone_savings"].startswith("pass")
        rows = list(csv.DictReader(open(tmp_path / "out" / "trajectory.csv")))
        assert len(rows) == 200
        assert all(r["rd_active"] == "0" for r in rows)

    def test_growth_simulation_reports_escape(self, tmp_path, capsys):
        cfg = write_config(tmp_path, a="50.0", b="20.0", x_lo="0.5",
                           x_hi="1e9", n="200", T="30")
        assert main(["simulate", "--config", str(cfg)]) == 0
        kv = parse_kv(capsys.readouterr().out)
        assert kv["regime"] == "SustainedGrowth"
        assert kv["takeoff"] == "0"
        assert kv["escape"] == "true"
        assert kv["escape_spot_checks_above_one"] == "true"
        assert "last_shares" in kv and "share_targets" in kv

    def test_drs_simulation_reports_margin(self, tmp_path, capsys):
        cfg = write_config(tmp_path, a="50.0", b="20.0", sigma="0.4",
                           X_0="0.1", x_lo="1e-3", x_hi="1e28", n="400",
                           T="300")
        assert main(["simulate", "--config", str(cfg)]) == 0
        kv = parse_kv(capsys.readouterr().out)
        assert kv["regime"] == "DRSConvergence"
        assert kv["converged"] == "true"
        assert float(kv["S_d"]) > 0
        assert float(kv["S_d_minus_S_b"]) > 0

    def test_trap_truncation_exits_3(self, tmp_path, capsys):
        # X_0 above the grid top: bounded dynamics not contained
        cfg = write_config(tmp_path, X_0="2.0", x_hi="1.5")
        assert main(["simulate", "--config", str(cfg)]) == 3
        assert "numerical-error" in capsys.readouterr().err

    def test_float_format_17_digits(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        main(["steady", "--config", str(cfg)])
        kv = parse_kv(capsys.readouterr().out)
        assert kv["S_a"] == "0.23039999999999999"


class TestSweep:
    def test_axis_validation(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["sweep", "--config", str(cfg), "--axis", "b:1:2:0"]) == 2
        assert main(["sweep", "--config", str(cfg), "--axis", "b:1:2"]) == 2
        assert main(["sweep", "--config", str(cfg), "--axis", "q:1:2:3"]) == 2
        assert main(["sweep", "--config", str(cfg),
                     "--axis", "a:1:2:2", "--axis", "b:1:2:2",
                     "--axis", "sigma:0.3:0.4:2"]) == 2

    def test_two_axis_row_major(self, tmp_path):
        import numpy as np
        cfg = write_config(tmp_path)
        assert main(["sweep", "--config", str(cfg), "--axis", "a:1:2:2",
                     "--axis", "b:0.2:0.4:3"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "out" / "sweep.csv")))
        expected = [(format(a, ".17g"), format(b, ".17g"))
                    for a in np.linspace(1, 2, 2)
                    for b in np.linspace(0.2, 0.4, 3)]
        assert [(r["a"], r["b"]) for r in rows] == expected

    def test_workers_do_not_change_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        args = ["sweep", "--config", str(cfg), "--axis", "b:0.2:3:12"]
        assert main(args + ["--out", str(tmp_path / "w1")]) == 0
        assert main(args + ["--out", str(tmp_path / "w4"), "--workers", "4"]) == 0
        assert (tmp_path / "w1" / "sweep.csv").read_bytes() \
            == (tmp_path / "w4" / "sweep.csv").read_bytes()

    def test_drs_never_sustained_growth(self, tmp_path):
        # alpha + sigma < 1 rules out the sustained-growth label
        cfg = write_config(tmp_path, sigma="0.4", X_0="0.1", b="20.0")
        assert main(["sweep", "--config", str(cfg), "--axis", "a:5:50:6"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "out" / "sweep.csv")))
        assert all(r["regime"] in ("DRSConvergence", "Indeterminate")
                   for r in rows)
        assert not any(r["regime"] == "SustainedGrowth" for r in rows)
