"""Scenario runner: evaluate technology curves, compute steady states, solve
and simulate, and sweep parameter axes, emitting CSV files and key=value
reports.

Config files are flat INI-style text (key = value inside named sections);
every parameter is explicit and unknown keys are rejected. Exit codes:
0 ok, 2 usage/config problem, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import technology as tech
from . import thresholds
from .bellman import GridSpec, euler_residual, vfi
from .errors import ConfigError, DomainError, NumericalError
from .model import LOG, POWER, Parameters, validate
from .simulate import (
    certify_escape,
    detect_rd_takeoff,
    simulate,
    verify_path_properties,
)

_PARAM_KEYS = ("alpha", "alpha_h", "alpha_e", "sigma", "beta", "A_c", "A_h",
               "A_e", "a", "b", "x_bar", "p", "p_n", "utility", "theta", "X_0")
_GRID_KEYS = ("x_lo", "x_hi", "n")
_RUN_KEYS = ("T", "tol", "seed")
_OUTPUT_KEYS = ("directory", "formats")
_SWEEP_AXES = ("a", "b", "x_bar", "beta", "sigma")


@dataclass(frozen=True)
class ScenarioConfig:
    params: Parameters
    x_lo: float
    x_hi: float
    n: int
    T: int
    tol: float
    seed: int
    directory: str
    formats: tuple[str, ...]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _get_float(section, key, where):
    raw = section.get(key)
    if raw is None:
        raise ConfigError(f"[{where}] missing required key '{key}'")
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{where}] {key}: not a number: {raw!r}") from None


def _get_int(section, key, where):
    raw = section.get(key)
    if raw is None:
        raise ConfigError(f"[{where}] missing required key '{key}'")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{where}] {key}: not an integer: {raw!r}") from None


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario file; unknown sections or keys are errors."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str  # parameter names are case-sensitive
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    known = {"parameters": _PARAM_KEYS, "grid": _GRID_KEYS, "run": _RUN_KEYS,
             "output": _OUTPUT_KEYS}
    for section in cp.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in known[section]:
                raise ConfigError(f"[{section}] unknown key '{key}'")
    for required in ("parameters", "grid", "run"):
        if required not in cp:
            raise ConfigError(f"missing section [{required}]")

    psec = cp["parameters"]
    utility = psec.get("utility")
    if utility is None:
        raise ConfigError("[parameters] missing required key 'utility'")
    utility = utility.strip()
    theta = None
    if utility == POWER:
        theta = _get_float(psec, "theta", "parameters")
    elif utility == LOG:
        if "theta" in psec:
            raise ConfigError("[parameters] theta is only valid with utility = power")
    else:
        raise ConfigError(f"[parameters] utility must be 'log' or 'power', got {utility!r}")
    kwargs = {k: _get_float(psec, k, "parameters")
              for k in _PARAM_KEYS if k not in ("utility", "theta")}
    try:
        params = validate(Parameters(utility=utility, theta=theta, **kwargs))
    except DomainError as exc:
        raise ConfigError(f"[parameters] {exc}") from None

    gsec = cp["grid"]
    x_lo = _get_float(gsec, "x_lo", "grid")
    x_hi = _get_float(gsec, "x_hi", "grid")
    n = _get_int(gsec, "n", "grid")
    if not (0.0 < x_lo < x_hi):
        raise ConfigError(f"[grid] needs 0 < x_lo < x_hi, got {x_lo}, {x_hi}")
    if n < 16:
        raise ConfigError(f"[grid] n must be >= 16, got {n}")

    rsec = cp["run"]
    T = _get_int(rsec, "T", "run")
    tol = _get_float(rsec, "tol", "run")
    seed = _get_int(rsec, "seed", "run") if "seed" in rsec else 0
    if T < 1:
        raise ConfigError(f"[run] T must be >= 1, got {T}")
    if not tol > 0.0:
        raise ConfigError(f"[run] tol must be > 0, got {tol}")

    directory = "."
    formats: tuple[str, ...] = ("csv",)
    if "output" in cp:
        osec = cp["output"]
        directory = osec.get("directory", ".").strip()
        fmts = tuple(f.strip() for f in osec.get("formats", "csv").split(",") if f.strip())
        for f in fmts:
            if f != "csv":
                raise ConfigError(f"[output] unsupported format {f!r}")
        formats = fmts or ("csv",)
    return ScenarioConfig(params=params, x_lo=x_lo, x_hi=x_hi, n=n, T=T,
                          tol=tol, seed=seed, directory=directory,
                          formats=formats)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def cmd_tech(config: ScenarioConfig, s_min: float, s_max: float,
             s_points: int, out_dir: str) -> int:
    """Technology curves on a log-spaced savings range -> tech.csv."""
    if s_points < 1:
        raise ConfigError(f"--s-points must be >= 1, got {s_points}")
    if not (0.0 < s_min <= s_max):
        raise ConfigError(f"need 0 < s_min <= s_max, got {s_min}, {s_max}")
    svals = np.geomspace(s_min, s_max, s_points)
    rows = []
    for S in svals:
        ev = tech.eval_G(config.params, float(S))
        al = tech.allocate(config.params, float(S))
        rows.append([ev.S, ev.F_val,
                     "" if ev.G0_val is None else _fmt(ev.G0_val),
                     ev.G_val, ev.regime, al.theta_c, al.theta_n, al.theta_h,
                     "" if ev.left_deriv is None else _fmt(ev.left_deriv),
                     _fmt(ev.right_deriv)])
    path = os.path.join(out_dir, "tech.csv")
    _write_csv(path, ["S", "F", "G0", "G", "regime", "theta_c", "theta_n",
                      "theta_h", "left_deriv", "right_deriv"], rows)
    print(f"wrote {path}")
    return 0


def _print_report(report: thresholds.SteadyStateReport) -> None:
    print(f"S_a={_fmt(report.S_a)}")
    print(f"S_b={_fmt(report.S_b)}")
    print(f"x_star={_fmt(report.x_star)}")
    print(f"S_bar={_fmt(report.S_bar)}")
    print(f"S_star={'none' if report.S_star is None else _fmt(report.S_star)}")
    print(f"Gamma={_fmt(report.Gamma)}")
    print(f"Fp_S_star={'none' if report.Fp_S_star is None else _fmt(report.Fp_S_star)}")
    print(f"assumption_irs={_fmt(report.flags.assumption_irs)}")
    print(f"curvature={_fmt(report.flags.curvature)}")
    print(f"growth_cond={_fmt(report.flags.growth_cond)}")
    print(f"trap_cond={_fmt(report.flags.trap_cond)}")
    print(f"regime={report.regime}")
    for c in report.conditions:
        print(f"cond.{c.name}={_fmt(c.lhs)}{c.op}{_fmt(c.rhs)}:{_fmt(c.holds)}")


def cmd_steady(config: ScenarioConfig) -> int:
    """Steady states, thresholds, and regime evidence as key=value lines."""
    report = thresholds.compute_report(config.params)
    _print_report(report)
    return 0


def _solve(config: ScenarioConfig):
    grid_spec = GridSpec(x_lo=config.x_lo, x_hi=config.x_hi, n=config.n)
    return vfi(config.params, grid_spec, config.tol)


def cmd_solve(config: ScenarioConfig, out_dir: str) -> int:
    """Value function iteration only -> value_policy.csv plus a summary."""
    vf, pol = _solve(config)
    rows = [[x, v, s, x - s, bool(tr)]
            for x, v, s, tr in zip(vf.grid, vf.values, pol.savings, pol.truncation)]
    path = os.path.join(out_dir, "value_policy.csv")
    _write_csv(path, ["X", "V", "S_next", "c", "truncated"], rows)
    print(f"sweeps={vf.sweeps}")
    print(f"final_sup_change={_fmt(float(vf.sup_changes[-1]))}")
    print(f"truncated_points={int(np.sum(pol.truncation))}")
    print(f"wrote {path}")
    return 0


def cmd_solve_and_simulate(config: ScenarioConfig, out_dir: str) -> int:
    """VFI + forward simulation -> trajectory.csv plus a path report.

    Exit 3 when a bounded (Trap) run leaves the grid: the grid must contain
    the bounded dynamics. Upward truncation in the growth regime is the
    expected escape and exits 0.
    """
    report = thresholds.compute_report(config.params)
    vf, pol = _solve(config)
    traj = simulate(config.params, pol, config.T, regime=report.regime)
    rows = [[s.t, s.X, s.S_next, s.c, s.alloc.K_c, s.alloc.N, s.alloc.H,
             1 if s.rd_active else 0] for s in traj.steps]
    path = os.path.join(out_dir, "trajectory.csv")
    _write_csv(path, ["t", "X", "S_next", "c", "K_c", "N", "H", "rd_active"], rows)

    takeoff = detect_rd_takeoff(traj)
    props = verify_path_properties(config.params, traj, report)
    print(f"regime={report.regime}")
    print(f"steps={len(traj.steps)}")
    print(f"takeoff={'none' if takeoff.t0 is None else takeoff.t0}")
    print(f"single_switch={_fmt(takeoff.single_switch)}")
    print(f"converged={_fmt(traj.meta.converged)}")
    print(f"truncated={_fmt(traj.meta.truncated)}")
    print(f"S_final={_fmt(traj.meta.S_final)}")
    for c in props.checks:
        status = "skip" if c.passed is None else ("pass" if c.passed else "FAIL")
        print(f"check.{c.name}={status}:{c.detail}")
    if report.regime == thresholds.DRS_CONVERGENCE and traj.steps:
        print(f"S_d={_fmt(traj.meta.S_final)}")
        print(f"S_d_minus_S_b={_fmt(traj.meta.S_final - report.S_b)}")
    if report.regime == thresholds.SUSTAINED_GROWTH:
        esc = certify_escape(config.params, traj, pol)
        print(f"escape={_fmt(esc.escaped)}")
        print(f"escape_spot_checks_above_one={_fmt(esc.all_spots_above_one)}")
        if traj.steps:
            last = traj.steps[-1].alloc
            tc, tn, th = tech.asymptotic_shares(config.params)
            print(f"last_shares={_fmt(last.theta_c)},{_fmt(last.theta_n)},{_fmt(last.theta_h)}")
            print(f"share_targets={_fmt(tc)},{_fmt(tn)},{_fmt(th)}")
    er = euler_residual(config.params, traj)
    print(f"euler_worst_violation={_fmt(er.worst_violation)}")
    print(f"wrote {path}")
    if traj.meta.truncated and report.regime == thresholds.TRAP:
        print("numerical-error: trajectory left the grid in the Trap regime",
              file=sys.stderr)
        return 3
    return 0


def _parse_axis(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError(f"axis must be NAME:LO:HI:N, got {spec!r}")
    name, lo_s, hi_s, n_s = parts
    if name not in _SWEEP_AXES:
        raise ConfigError(f"axis name must be one of {_SWEEP_AXES}, got {name!r}")
    try:
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise ConfigError(f"bad axis numbers in {spec!r}") from None
    if n < 1:
        raise ConfigError(f"axis cell count must be >= 1, got {n}")
    if not (lo <= hi):
        raise ConfigError(f"axis needs lo <= hi, got {lo} > {hi}")
    return name, np.linspace(lo, hi, n)


def _sweep_cell(params: Parameters):
    try:
        rep = thresholds.compute_report(params)
        err = ""
    except NumericalError as exc:
        return None, str(exc)
    return rep, err


def cmd_sweep(config: ScenarioConfig, axis_specs: list[str], out_dir: str,
              workers: int = 1) -> int:
    """Regime map over 1-2 parameter axes -> sweep.csv, row-major order."""
    if not axis_specs:
        raise ConfigError("sweep needs at least one --axis")
    if len(axis_specs) > 2:
        raise ConfigError(f"at most 2 axes, got {len(axis_specs)}")
    axes = [_parse_axis(s) for s in axis_specs]
    names = [a[0] for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError("axis names must be distinct")

    cells = []
    if len(axes) == 1:
        for v in axes[0][1]:
            cells.append({names[0]: float(v)})
    else:
        for v1 in axes[0][1]:
            for v2 in axes[1][1]:
                cells.append({names[0]: float(v1), names[1]: float(v2)})

    base = config.params
    cell_params = []
    for cell in cells:
        try:
            cell_params.append(validate(replace(base, **cell)))
        except DomainError as exc:
            raise ConfigError(f"sweep cell {cell} invalid: {exc}") from None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_cell, cell_params))
    else:
        results = [_sweep_cell(p) for p in cell_params]

    header = list(names) + ["alpha", "alpha_h", "alpha_e", "sigma", "beta",
                            "A_c", "A_h", "A_e", "a", "b", "x_bar", "p", "p_n",
                            "utility", "theta", "X_0", "regime", "S_a", "S_b",
                            "x_star", "S_star", "Gamma", "growth_metric",
                            "trap_lhs", "trap_rhs", "assumption_irs",
                            "curvature", "growth_cond", "trap_cond", "error"]
    rows = []
    for cell, p, (rep, err) in zip(cells, cell_params, results):
        row = [cell[nm] for nm in names]
        row += [p.alpha, p.alpha_h, p.alpha_e, p.sigma, p.beta, p.A_c, p.A_h,
                p.A_e, p.a, p.b, p.x_bar, p.p, p.p_n, p.utility,
                "" if p.theta is None else _fmt(p.theta), p.X_0]
        if rep is None:
            row += ["Error"] + [math.nan] * 8 + [False] * 4 + [err]
        else:
            growth_metric = (math.nan if rep.Fp_S_star is None
                             else p.beta * min(rep.Fp_S_star, rep.Gamma))
            row += [rep.regime, rep.S_a, rep.S_b, rep.x_star,
                    math.nan if rep.S_star is None else rep.S_star,
                    rep.Gamma, growth_metric,
                    p.b * rep.x_star**p.sigma, p.x_bar,
                    rep.flags.assumption_irs, rep.flags.curvature,
                    rep.flags.growth_cond, rep.flags.trap_cond, ""]
        rows.append(row)
    path = os.path.join(out_dir, "sweep.csv")
    _write_csv(path, header, rows)
    print(f"wrote {path}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"usage-error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fdigrowth",
                     description="Host-country growth scenarios with FDI and R&D")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=None, help="output directory override")

    p_tech = sub.add_parser("tech", help="technology curves over a savings range")
    common(p_tech)
    p_tech.add_argument("--s-min", type=float, required=True)
    p_tech.add_argument("--s-max", type=float, required=True)
    p_tech.add_argument("--s-points", type=int, required=True)

    p_steady = sub.add_parser("steady", help="steady states and regime report")
    common(p_steady)

    p_solve = sub.add_parser("solve", help="value function iteration")
    common(p_solve)

    p_sim = sub.add_parser("simulate", help="solve then roll the policy forward")
    common(p_sim)

    p_sweep = sub.add_parser("sweep", help="regime map over parameter axes")
    common(p_sweep)
    p_sweep.add_argument("--axis", action="append", default=[],
                         metavar="NAME:LO:HI:N")
    p_sweep.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config)
        out_dir = args.out if args.out is not None else config.directory
        if args.command == "tech":
            return cmd_tech(config, args.s_min, args.s_max, args.s_points, out_dir)
        if args.command == "steady":
            return cmd_steady(config)
        if args.command == "solve":
            return cmd_solve(config, out_dir)
        if args.command == "simulate":
            return cmd_solve_and_simulate(config, out_dir)
        if args.command == "sweep":
            return cmd_sweep(config, args.axis, out_dir, workers=args.workers)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, DomainError) as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical-error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
