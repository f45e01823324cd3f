"""Model primitives: validated parameters, the equilibrium wage, one-period
technologies, and the utility family.

All quantities are in units of the consumption good unless noted.  Types are
frozen dataclasses; every operation is a pure function of its arguments, so
instances can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

LOG = "log"
POWER = "power"


@dataclass(frozen=True)
class Parameters:
    """Exogenous constants of the host-country growth model.

    alpha, alpha_h, alpha_e : output elasticities (domestic consumption
        sector, training technology, multinational plant), each in (0, 1).
    sigma : R&D elasticity, in (0, 1).
    beta : discount factor, in (0, 1).
    A_c, A_h, A_e : TFP of the consumption sector, training efficiency, and
        multinational TFP (A_e may be 0: no foreign firm).
    a : leverage of successful R&D on the consumption sector's TFP.
    b : research-process efficiency; N units of R&D spending deliver
        b * N**sigma units of new technology.
    x_bar : fixed cost in technology units; TFP rises only once
        b * N**sigma exceeds x_bar.
    p, p_n : prices of physical capital and of the new good.
    utility : "log" or "power"; theta is the curvature of the power family
        (theta > 0, theta != 1).
    X_0 : initial resource.
    """

    alpha: float
    alpha_h: float
    alpha_e: float
    sigma: float
    beta: float
    A_c: float
    A_h: float
    A_e: float
    a: float
    b: float
    x_bar: float
    p: float
    p_n: float
    utility: str = LOG
    theta: float | None = None
    X_0: float = 1.0


@dataclass(frozen=True)
class DerivedConstants:
    """Constants implied by Parameters.

    w : equilibrium wage per unit of specific labor (constant over time).
    A : composite TFP of the no-R&D technology; only defined when
        alpha == alpha_h (None otherwise).
    N_1 : minimal R&D spending that meets the fixed cost, (x_bar/b)**(1/sigma).
    x_1 : budget level at which the R&D-capital split leaves its corner.
    x_2 : budget level where the R&D branch first matches the pure-capital
        technology; diagnostic, filled in lazily by the technology module.
    """

    w: float
    A: float | None
    N_1: float
    x_1: float
    x_2: float | None = None


def validate(params: Parameters) -> Parameters:
    """Check every model assumption; return the record unchanged if valid.

    Raises DomainError naming the violated invariant otherwise.
    """
    for name in ("alpha", "alpha_h", "alpha_e", "sigma", "beta"):
        v = getattr(params, name)
        if not (0.0 < v < 1.0):
            raise DomainError(f"{name} must lie strictly inside (0, 1), got {v}")
    for name in ("A_c", "A_h", "p"):
        v = getattr(params, name)
        if not v > 0.0:
            raise DomainError(f"{name} must be > 0, got {v}")
    for name in ("A_e", "p_n"):
        v = getattr(params, name)
        if not v >= 0.0:
            raise DomainError(f"{name} must be >= 0, got {v}")
    for name in ("a", "b", "x_bar", "X_0"):
        v = getattr(params, name)
        if not v > 0.0:
            raise DomainError(f"{name} must be > 0, got {v}")
    if not params.a * params.x_bar > params.A_c:
        raise DomainError(
            "fixed-cost leverage too low: a*x_bar <= A_c "
            f"({params.a * params.x_bar} <= {params.A_c})"
        )
    if params.utility == LOG:
        if params.theta is not None:
            raise DomainError("theta must be omitted for log utility")
    elif params.utility == POWER:
        if params.theta is None:
            raise DomainError("power utility requires theta")
        if not (params.theta > 0.0) or params.theta == 1.0:
            raise DomainError(f"theta must be > 0 and != 1, got {params.theta}")
    else:
        raise DomainError(f"utility must be 'log' or 'power', got {params.utility!r}")
    return params


def wage(params: Parameters) -> float:
    """Equilibrium wage for specific labor.

    w = (alpha_e**alpha_e * (1-alpha_e)**(1-alpha_e) * p_n*A_e / p**alpha_e)
        ** (1/(1-alpha_e))

    Zero exactly when p_n*A_e == 0 (no multinational activity).
    """
    ae = params.alpha_e
    base = ae**ae * (1.0 - ae) ** (1.0 - ae) * params.p_n * params.A_e / params.p**ae
    return base ** (1.0 / (1.0 - ae))


def mne_factor_demands(params: Parameters, L_e: float) -> tuple[float, float]:
    """Profit-maximising capital demand of the multinational and its profit.

    With constant returns and competitive prices the maximised profit is zero
    for any labor level; the function returns it evaluated explicitly as a
    consistency check.
    """
    if L_e < 0.0:
        raise DomainError(f"L_e must be >= 0, got {L_e}")
    ae = params.alpha_e
    K_e = L_e * (params.p_n * params.A_e * ae / params.p) ** (1.0 / (1.0 - ae))
    w = wage(params)
    output = params.p_n * params.A_e * K_e**ae * L_e ** (1.0 - ae)
    profit = output - params.p * K_e - w * L_e
    return K_e, profit


def utility(params: Parameters, c: float) -> float:
    """Instantaneous utility. Requires c > 0 (marginal utility diverges at 0)."""
    if c <= 0.0:
        raise DomainError(f"consumption must be > 0, got {c}")
    if params.utility == LOG:
        return math.log(c)
    theta = params.theta
    return c ** (1.0 - theta) / (1.0 - theta)


def marginal_utility(params: Parameters, c: float) -> float:
    """u'(c); 1/c for log, c**(-theta) for the power family."""
    if c <= 0.0:
        raise DomainError(f"consumption must be > 0, got {c}")
    if params.utility == LOG:
        return 1.0 / c
    return c ** (-params.theta)


def g(params: Parameters, K_c: float, N: float, H: float) -> float:
    """One-period output of a feasible plan (K_c, N, H).

    (A_c + a*max(b*N**sigma - x_bar, 0)) * K_c**alpha + w*A_h*H**alpha_h
    """
    if K_c < 0.0 or N < 0.0 or H < 0.0:
        raise DomainError("K_c, N, H must all be >= 0")
    boost = params.b * N**params.sigma - params.x_bar
    tfp = params.A_c + params.a * boost if boost > 0.0 else params.A_c
    w = wage(params)
    return tfp * K_c**params.alpha + w * params.A_h * H**params.alpha_h


@lru_cache(maxsize=256)
def derived_constants(params: Parameters) -> DerivedConstants:
    """Wage, composite TFP, and the R&D corner levels N_1 and x_1.

    x_2 is left as None here; it needs the full R&D-branch solver and is
    exposed by the technology module.
    """
    w = wage(params)
    alpha, alpha_h = params.alpha, params.alpha_h
    A = None
    if alpha == alpha_h:
        e = 1.0 / (1.0 - alpha)
        A = ((params.A_c / params.p**alpha) ** e + (w * params.A_h) ** e) ** (1.0 - alpha)
    N_1 = (params.x_bar / params.b) ** (1.0 / params.sigma)
    ax = params.a * params.x_bar
    x_1 = ((alpha + params.sigma) / params.sigma
           - (alpha / params.sigma) * (ax - params.A_c) / ax) * N_1
    return DerivedConstants(w=w, A=A, N_1=N_1, x_1=x_1)
