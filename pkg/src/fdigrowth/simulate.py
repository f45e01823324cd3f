"""Forward simulation of the optimal policy and path-level verification.

A trajectory records, per period, the resource X_t, the chosen savings
S_{t+1}, consumption, and the full static allocation of the savings. The
accounting identities c_t + S_{t+1} = X_t and X_{t+1} = G(S_{t+1}) hold by
construction; verification functions check the qualitative properties the
theory predicts (monotonicity, no collapse, boundedness, R&D takeoff
structure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import technology as tech
from .bellman import Policy
from .errors import DomainError
from .model import Parameters
from .technology import Allocation
from .thresholds import DRS_CONVERGENCE, SUSTAINED_GROWTH, TRAP, SteadyStateReport

CONV_REL = 1e-9
CONV_RUN = 10


@dataclass(frozen=True)
class TrajectoryStep:
    t: int
    X: float
    S_next: float
    c: float
    alloc: Allocation
    rd_active: bool


@dataclass(frozen=True)
class TrajectoryMeta:
    regime: str | None
    truncated: bool
    T_requested: int
    converged: bool
    S_final: float


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[TrajectoryStep, ...]
    meta: TrajectoryMeta

    def savings(self) -> np.ndarray:
        return np.array([s.S_next for s in self.steps])

    def resources(self) -> np.ndarray:
        return np.array([s.X for s in self.steps])


def simulate(params: Parameters, policy: Policy, T: int,
             regime: str | None = None) -> Trajectory:
    """Roll the savings policy forward from X_0 for T periods.

    Stops early with a truncation flag when the resource leaves the policy
    grid at the top; X_0 below the bottom of the grid is an error.
    Convergence is declared after `CONV_RUN` consecutive savings changes
    below `CONV_REL` relative.
    """
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    grid = policy.grid
    X = float(params.X_0)
    if X < grid[0] * (1.0 - 1e-12):
        raise DomainError(
            f"X_0 = {X} lies below the policy grid (x_lo = {grid[0]})")
    steps: list[TrajectoryStep] = []
    truncated = False
    converged = False
    run = 0
    prev_S = None
    for t in range(T):
        if X > grid[-1] * (1.0 + 1e-12):
            truncated = True
            break
        S = float(policy(X))
        if S > X:
            S = X
        c = X - S
        alloc = tech.allocate(params, S)
        steps.append(TrajectoryStep(t=t, X=X, S_next=S, c=c, alloc=alloc,
                                    rd_active=alloc.rd_active))
        if prev_S is not None:
            if abs(S - prev_S) < CONV_REL * max(1.0, S):
                run += 1
                if run >= CONV_RUN:
                    converged = True
            else:
                run = 0
        prev_S = S
        X = alloc.value  # X_{t+1} = G(S_{t+1}) by construction
    s_final = steps[-1].S_next if steps else math.nan
    meta = TrajectoryMeta(regime=regime, truncated=truncated, T_requested=T,
                          converged=converged, S_final=s_final)
    return Trajectory(steps=tuple(steps), meta=meta)


@dataclass(frozen=True)
class TakeoffReport:
    """First period with positive R&D spending and the switch structure."""

    t0: int | None
    single_switch: bool
    violations: tuple[int, ...]


def detect_rd_takeoff(traj: Trajectory) -> TakeoffReport:
    """Smallest t with N_t > 0 (None when R&D never starts).

    Also verifies the single-switch structure: no period after the takeoff
    may drop back to N = 0; violating periods are reported.
    """
    t0 = None
    violations = []
    for s in traj.steps:
        n_pos = s.alloc.N > 0.0
        if t0 is None and n_pos:
            t0 = s.t
        elif t0 is not None and not n_pos:
            violations.append(s.t)
    return TakeoffReport(t0=t0, single_switch=not violations,
                         violations=tuple(violations))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool | None   # None = skipped (not applicable in this regime)
    detail: str


@dataclass(frozen=True)
class PathPropertyReport:
    checks: tuple[CheckResult, ...]

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_applicable_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)


def verify_path_properties(params: Parameters, traj: Trajectory,
                           report: SteadyStateReport) -> PathPropertyReport:
    """Path-level checks of the theory's qualitative predictions.

    (a) the savings path is monotone (either direction);
    (b) savings stay above min(S_1, 1e-4) from period 5 on (no collapse);
    (c) savings respect the S_bar bound in the Trap and DRS regimes -- note
        the bound is derived from the no-R&D recursion, so a DRS path that
        activates R&D can exceed it and will be reported here honestly;
    (d) in the DRS regime the path limit stays within 1e-3 of (or above)
        the no-R&D steady state S_b.
    """
    S = traj.savings()
    checks: list[CheckResult] = []

    if S.size >= 2:
        d = np.diff(S)
        tol = 1e-9 * max(1.0, float(np.max(S)))
        monotone = bool(np.all(d >= -tol) or np.all(d <= tol))
    else:
        monotone = True
    checks.append(CheckResult("monotone_savings", monotone,
                              f"{S.size} steps"))

    if S.size > 5:
        delta = min(float(S[0]), 1e-4)
        floor = float(np.min(S[5:]))
        checks.append(CheckResult("no_collapse", floor >= delta * (1.0 - 1e-12),
                                  f"min S_t for t>=5 is {floor:.6g}, floor {delta:.6g}"))
    else:
        checks.append(CheckResult("no_collapse", True, "path shorter than 6 steps"))

    in_bounded_regime = report.regime in (TRAP, DRS_CONVERGENCE)
    if in_bounded_regime:
        bound = report.S_bar + 1e-6 * max(1.0, report.S_bar)
        worst = float(np.max(S)) if S.size else 0.0
        checks.append(CheckResult("sbar_bound", worst <= bound,
                                  f"max S_t = {worst:.6g}, S_bar = {report.S_bar:.6g}"))
    else:
        checks.append(CheckResult("sbar_bound", None, "regime not bounded"))

    if report.regime == DRS_CONVERGENCE:
        s_d = float(S[-1]) if S.size else math.nan
        ok = s_d >= report.S_b - 1e-3
        margin = s_d - report.S_b
        checks.append(CheckResult("drs_limit_at_least_Sb", ok,
                                  f"S_d = {s_d:.6g}, S_b = {report.S_b:.6g}, "
                                  f"margin = {margin:.6g}"))
    else:
        checks.append(CheckResult("drs_limit_at_least_Sb", None,
                                  "regime is not DRS"))

    return PathPropertyReport(checks=tuple(checks))


@dataclass(frozen=True)
class EscapeReport:
    escaped: bool
    t_escape: int | None
    increasing_before_escape: bool
    spot_checks: tuple[tuple[float, float], ...]   # (S, beta * D+G(S))
    all_spots_above_one: bool


def escape_time(traj: Trajectory, policy: Policy) -> int | None:
    """First period whose resource reaches 0.9 of the grid top.

    With increasing returns the technology explodes, so the resource hits
    the top of the grid while savings lag far behind; beyond this period the
    clamped continuation value distorts the policy and the path parks at an
    artificial grid-bound fixed point.
    """
    top = float(policy.grid[-1])
    for s in traj.steps:
        if s.X >= 0.9 * top:
            return s.t
    if traj.meta.truncated:
        return len(traj.steps)
    return None


def certify_escape(params: Parameters, traj: Trajectory, policy: Policy
                   ) -> EscapeReport:
    """Growth certification: the path climbed out of the grid.

    Escape means the trajectory truncated upward or its resource reached
    0.9 of the grid top, with savings strictly increasing up to that period.
    Spot checks confirm beta * D+G > 1 at the five largest grid points, the
    sufficient condition for unbounded accumulation.
    """
    S = traj.savings()
    t_esc = escape_time(traj, policy)
    if t_esc is None:
        head = S
        left_grid = False
    else:
        head = S[: max(t_esc, 1)]
        left_grid = True
    increasing = bool(head.size < 2 or np.all(np.diff(head) > 0.0))
    gfun = lambda s: tech.eval_G_value(params, s)
    spots = []
    for s in policy.grid[-5:]:
        dplus = tech.numeric_dini(gfun, float(s), "plus")
        spots.append((float(s), params.beta * dplus))
    all_above = all(v > 1.0 for _, v in spots)
    return EscapeReport(escaped=left_grid and increasing,
                        t_escape=t_esc,
                        increasing_before_escape=increasing,
                        spot_checks=tuple(spots),
                        all_spots_above_one=all_above)
