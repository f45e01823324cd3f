"""Steady states, boundedness thresholds, and regime classification.

Three long-run outcomes are distinguished: a middle-income trap (the economy
never funds R&D and converges to the no-R&D steady state), sustained growth
(savings diverge once the technology's marginal product stays above 1/beta),
and convergence to a finite R&D-active steady state under decreasing returns.
The classifier only labels a draw when the corresponding sufficient
conditions hold; anything else is Indeterminate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import technology as tech
from .errors import NumericalError
from .model import Parameters, derived_constants

TRAP = "Trap"
SUSTAINED_GROWTH = "SustainedGrowth"
DRS_CONVERGENCE = "DRSConvergence"
INDETERMINATE = "Indeterminate"

_BRACKET_CAP = 1e12


@dataclass(frozen=True)
class Condition:
    """One audited inequality: lhs <op> rhs, and whether it held."""

    name: str
    lhs: float
    op: str
    rhs: float
    holds: bool


@dataclass(frozen=True)
class RegimeFlags:
    assumption_irs: bool      # alpha + sigma >= 1
    curvature: bool           # alpha_h + 1/alpha >= 2
    growth_cond: bool         # beta * min(F'(S*), Gamma) > 1
    trap_cond: bool           # X_0 <= x* and b*(x*)**sigma <= x_bar


@dataclass(frozen=True)
class SteadyStateReport:
    """Steady states, bounds, and the audited regime classification."""

    S_a: float
    S_b: float
    x_star: float
    S_bar: float
    S_star: float | None
    Gamma: float
    Fp_S_star: float | None
    flags: RegimeFlags
    regime: str
    conditions: tuple[Condition, ...]


def steady_autarky(params: Parameters) -> float:
    """Closed-economy steady state: S_a = (alpha*beta*A_c/p**alpha)**(1/(1-alpha))."""
    return (params.alpha * params.beta * params.A_c / params.p**params.alpha) ** (
        1.0 / (1.0 - params.alpha))


def steady_fdi_no_rd(params: Parameters) -> float:
    """Steady state with the multinational present but no R&D: beta*F'(S_b) = 1.

    F' falls monotonically from +inf, so a doubling bracket plus bisection is
    enough; the alpha == alpha_h closed form is used as a cross-check in tests.
    """
    beta = params.beta

    def h(S):
        return beta * tech.F_prime(params, S) - 1.0

    lo = 1e-12
    if h(lo) <= 0.0:
        raise NumericalError("marginal product already below 1/beta at S=1e-12")
    hi = 1.0
    while h(hi) > 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NumericalError(f"no steady-state bracket below {_BRACKET_CAP}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fixed_point_xstar(params: Parameters) -> float:
    """Positive fixed point of the no-R&D technology, F(x*) = x*."""

    def q(x):
        return tech.eval_F(params, x)[0] - x

    lo = 1e-12
    if q(lo) <= 0.0:
        raise NumericalError("F(x) <= x already at x=1e-12")
    hi = 1.0
    while q(hi) > 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NumericalError(f"no fixed-point bracket below {_BRACKET_CAP}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def compute_report(params: Parameters) -> SteadyStateReport:
    """All steady states and thresholds plus the audited classification."""
    S_a = steady_autarky(params)
    S_b = steady_fdi_no_rd(params)
    x_star = fixed_point_xstar(params)
    S_bar = max(params.X_0, x_star)
    Gamma = tech.gamma_bound(params)

    irs_lhs = params.alpha + params.sigma
    irs = irs_lhs >= 1.0
    curv_lhs = params.alpha_h + 1.0 / params.alpha
    curvature = curv_lhs >= 2.0

    S_star = None
    Fp_S_star = None
    growth_lhs = math.nan
    growth_cond = False
    if irs:
        try:
            S_star = tech.find_S_star(params)
        except NumericalError:
            # threshold beyond the search cap: F' is decreasing, so if the
            # marginal product is already below 1/beta at the cap the growth
            # condition fails regardless of where S* sits
            if params.beta * tech.F_prime(params, tech._S_CAP) < 1.0:
                growth_lhs = params.beta * tech.F_prime(params, tech._S_CAP)
            else:
                raise
        if S_star is not None:
            Fp_S_star = tech.F_prime(params, S_star)
            growth_lhs = params.beta * min(Fp_S_star, Gamma)
            growth_cond = growth_lhs > 1.0

    trap_x0 = params.X_0 <= x_star
    trap_rd_lhs = params.b * x_star**params.sigma
    trap_rd = trap_rd_lhs <= params.x_bar
    trap_cond = trap_x0 and trap_rd

    conditions = (
        Condition("trap_initial_resource", params.X_0, "<=", x_star, trap_x0),
        Condition("trap_rd_infeasible_at_xstar", trap_rd_lhs, "<=", params.x_bar, trap_rd),
        Condition("increasing_returns", irs_lhs, ">=", 1.0, irs),
        Condition("curvature", curv_lhs, ">=", 2.0, curvature),
        Condition("growth_marginal_product", growth_lhs, ">", 1.0, growth_cond),
        Condition("drs_initial_below_Sb", params.X_0, "<", S_b, params.X_0 < S_b),
    )

    if trap_cond:
        regime = TRAP
    elif irs and curvature and growth_cond:
        regime = SUSTAINED_GROWTH
    elif (not irs) and params.X_0 < S_b:
        regime = DRS_CONVERGENCE
    else:
        regime = INDETERMINATE

    flags = RegimeFlags(assumption_irs=irs, curvature=curvature,
                        growth_cond=growth_cond, trap_cond=trap_cond)
    return SteadyStateReport(S_a=S_a, S_b=S_b, x_star=x_star, S_bar=S_bar,
                             S_star=S_star, Gamma=Gamma, Fp_S_star=Fp_S_star,
                             flags=flags, regime=regime, conditions=conditions)


def classify_regime(params: Parameters) -> tuple[str, tuple[Condition, ...]]:
    """Regime label plus the evidence record of every evaluated inequality."""
    report = compute_report(params)
    return report.regime, report.conditions
