"""Static allocation problem: the no-R&D technology F, the constrained-R&D
technology G_0, their upper envelope G, the takeoff threshold, and the
long-run growth bound.

The one-period planner splits savings S between physical capital, R&D, and
training. R&D only raises TFP once its output clears a fixed cost, which
makes G non-concave with a kink at a unique takeoff threshold S*: below it
the no-R&D split is optimal, above it R&D strictly dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as _k
from . import _kernels_np as _knp
from ._backend import using_numba
from .errors import DomainError, NumericalError, PreconditionError
from .model import Parameters, derived_constants

NO_RD = "NoRD"
RD = "RD"

_S_CAP = 1e9
DINI_STEPS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


@dataclass(frozen=True)
class Allocation:
    """Argmax of the one-period problem at savings S, with budget shares."""

    S: float
    K_c: float
    N: float
    H: float
    theta_c: float
    theta_n: float
    theta_h: float
    rd_active: bool
    value: float


@dataclass(frozen=True)
class TechEval:
    """Values and one-sided derivative estimates of the technology at S.

    G0_val is None when no feasible point meets the fixed cost within the
    budget. left_deriv/right_deriv are numeric Dini estimates (None when not
    computed, left also None at S == 0).
    """

    S: float
    F_val: float
    F_prime: float
    G0_val: float | None
    G_val: float
    left_deriv: float | None
    right_deriv: float | None
    regime: str


@dataclass(frozen=True)
class GTable:
    """Dense knot table of G and its envelope derivative, for interpolation."""

    knots: np.ndarray
    G: np.ndarray
    G_prime: np.ndarray
    regime: np.ndarray
    K_c: np.ndarray
    N: np.ndarray
    H: np.ndarray
    s_star: float | None

    def g_of(self, S):
        return np.interp(S, self.knots, self.G)

    def gprime_of(self, S):
        return np.interp(S, self.knots, self.G_prime)


@lru_cache(maxsize=256)
def _pack(params: Parameters):
    d = derived_constants(params)
    return (params.alpha, params.alpha_h, params.sigma, params.A_c, params.A_h,
            params.a, params.b, params.x_bar, params.p, d.w, d.N_1, d.x_1)


def _b1b2(params: Parameters):
    d = derived_constants(params)
    return params.A_c / params.p**params.alpha, d.w * params.A_h


def eval_F(params: Parameters, S: float) -> tuple[float, float, float]:
    """No-R&D technology: max of capital plus training output. -> (value, K_c, H).

    Strictly increasing and strictly concave with an infinite slope at 0.
    """
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    B1, B2 = _b1b2(params)
    val, x = _k.f_split(params.alpha, params.alpha_h, B1, B2, float(S))
    return val, x / params.p, S - x


def F_prime(params: Parameters, S: float) -> float:
    """Envelope derivative of the no-R&D technology; requires S > 0."""
    if S <= 0.0:
        raise DomainError(f"S must be > 0, got {S}")
    B1, B2 = _b1b2(params)
    return _k.f_prime(params.alpha, params.alpha_h, B1, B2, float(S))


def eval_G1(params: Parameters, x: float) -> tuple[float, float, float]:
    """Capital/R&D split of a budget x with the fixed cost binding from below.

    -> (value, K_c, N). Zero below the feasibility point N_1; R&D pinned at
    N_1 on the corner segment (N_1, x_1]; interior split beyond x_1.
    """
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x}")
    pp = _pack(params)
    val, K, N = _k.g1_solve(pp[0], pp[2], pp[3], pp[5], pp[6], pp[7], pp[8],
                            pp[10], pp[11], float(x))
    if not math.isfinite(val):
        raise NumericalError(f"R&D split failed at x={x}")
    return val, K, N


def eval_G0(params: Parameters, S: float) -> tuple[float, Allocation] | None:
    """Technology value with R&D forced to meet the fixed cost.

    None when infeasible (S below the minimal R&D spend N_1); otherwise
    (value, Allocation).
    """
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    pp = _pack(params)
    if using_numba():
        ok, val, x, K, N, H = _k.g0_solve(*pp, float(S))
        feasible = bool(ok)
    else:
        feas, val, x, K, N, H = _knp.g0_solve(*pp, np.array([float(S)]))
        feasible = bool(feas[0])
        val, K, N, H = float(val[0]), float(K[0]), float(N[0]), float(H[0])
    if not feasible:
        return None
    return val, _make_alloc(params, S, K, N, H, val)


def _make_alloc(params: Parameters, S, K, N, H, value) -> Allocation:
    if S > 0.0:
        tc = params.p * K / S
        tn = N / S
        th = H / S
    else:
        tc = tn = th = 0.0
    rd = params.b * N**params.sigma > params.x_bar
    return Allocation(S=float(S), K_c=float(K), N=float(N), H=float(H),
                      theta_c=float(tc), theta_n=float(tn), theta_h=float(th),
                      rd_active=bool(rd), value=float(value))


def _g_point(params: Parameters, S: float):
    """Raw static solve: (G, F, G0, feasible, regime, K_c, N, H, G_prime)."""
    pp = _pack(params)
    if using_numba():
        return _k.g_point(*pp, float(S))
    out = _knp.g_point(*pp, np.array([float(S)]))
    G, F, G0, feas, reg, K, N, H, Gp = (float(v[0]) for v in out)
    return G, F, G0, bool(feas), int(reg), K, N, H, Gp


def eval_G_value(params: Parameters, S: float) -> float:
    """G(S) alone; the cheap path used by simulation and root finding."""
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    return _g_point(params, S)[0]


def allocate(params: Parameters, S: float) -> Allocation:
    """Argmax of the one-period problem at savings S."""
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    G, F, G0, feas, reg, K, N, H, Gp = _g_point(params, S)
    return _make_alloc(params, S, K, N, H, G)


def eval_G(params: Parameters, S: float, compute_derivs: bool = True) -> TechEval:
    """Upper envelope of the two technologies at S, as a TechEval record.

    regime is "RD" only when the constrained-R&D value strictly exceeds the
    no-R&D value; a tie keeps "NoRD". One-sided derivative estimates come
    from `numeric_dini` and can be skipped for bulk scans.
    """
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    G, F, G0, feas, reg, K, N, H, Gp = _g_point(params, S)
    fp = F_prime(params, S) if S > 0.0 else math.inf
    left = right = None
    if compute_derivs:
        f = lambda s: eval_G_value(params, s)
        right = numeric_dini(f, S, "plus") if S >= 0.0 else None
        left = numeric_dini(f, S, "minus") if S > 0.0 else None
    return TechEval(S=float(S), F_val=F, F_prime=fp,
                    G0_val=(G0 if feas else None), G_val=G,
                    left_deriv=left, right_deriv=right,
                    regime=RD if reg == 1 else NO_RD)


def G_prime_envelope(params: Parameters, S: float) -> float:
    """Envelope derivative of G along the winning branch (left branch at S*)."""
    if S <= 0.0:
        raise DomainError(f"S must be > 0, got {S}")
    return _g_point(params, S)[8]


def _g0_minus_f(params: Parameters, S: float) -> float:
    G, F, G0, feas, *_ = _g_point(params, S)
    if not feas:
        return -math.inf
    return G0 - F


@lru_cache(maxsize=256)
def _s_star_or_none(params: Parameters) -> float | None:
    """Unique root of G_0 - F when it exists below the search cap.

    Used internally by the table builder for any parameter set; the public
    `find_S_star` additionally enforces the increasing-returns precondition.
    """
    d = derived_constants(params)
    lo = d.N_1  # G_0(N_1) = 0 < F(N_1), so the difference starts negative
    hi = max(d.N_1, 1e-6)
    while _g0_minus_f(params, hi) <= 0.0:
        hi *= 2.0
        if hi > _S_CAP:
            return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _g0_minus_f(params, mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(1.0, lo):
            break
    return 0.5 * (lo + hi)


def find_S_star(params: Parameters) -> float:
    """Takeoff threshold: the unique S* with G_0(S*) = F(S*).

    Requires increasing returns to scale (alpha + sigma >= 1). Bracketing
    doubles from max(N_1, 1e-6) up to a 1e9 cap; the difference G_0 - F is
    strictly increasing, so plain bisection applies.
    """
    if params.alpha + params.sigma < 1.0:
        raise PreconditionError(
            f"takeoff threshold requires alpha + sigma >= 1, got "
            f"{params.alpha + params.sigma}")
    s = _s_star_or_none(params)
    if s is None:
        raise NumericalError(
            f"no sign change of G_0 - F found below {_S_CAP}; the R&D branch "
            "never dominates at this parameter set")
    resid = _g0_minus_f(params, s)
    if abs(resid) > 1e-8:
        raise NumericalError(f"takeoff threshold residual too large: {resid}")
    if params.b * s**params.sigma <= params.x_bar:
        raise NumericalError(
            f"takeoff threshold inconsistent: b*S*^sigma = "
            f"{params.b * s**params.sigma} does not exceed x_bar = {params.x_bar}")
    return s


def gamma_bound(params: Parameters) -> float:
    """Closed-form lower bound on the R&D-branch marginal productivity.

    Strictly increasing in the leverage a; increasing in the research
    efficiency b whenever alpha_h + 1/alpha >= 2.
    """
    al, ah, sg = params.alpha, params.alpha_h, params.sigma
    w = derived_constants(params).w
    num = ((al * params.A_c / (params.p * sg)) ** al
           * params.x_bar ** (-(1.0 - al) * (1.0 - sg) / sg)
           * params.a ** (1.0 - al)
           * params.b ** ((1.0 - al) / sg))
    C = (ah * w * params.A_h * (params.p * sg) ** al
         / (sg * (al * params.A_c) ** al)) ** (1.0 / (1.0 - ah))
    den = (1.0 + al / sg
           + C / (params.a ** ((1.0 - al) / (1.0 - ah))
                  * params.b ** ((ah - al) / (sg * (1.0 - ah))))) ** al
    return num / den


def asymptotic_shares(params: Parameters) -> tuple[float, float, float]:
    """Large-S limits of the budget shares (capital, R&D, training)."""
    if params.alpha + params.sigma < 1.0:
        raise PreconditionError(
            f"share limits require alpha + sigma >= 1, got "
            f"{params.alpha + params.sigma}")
    s = params.alpha + params.sigma
    return params.alpha / s, params.sigma / s, 0.0


def rd_lower_bound_check(params: Parameters, S: float) -> bool:
    """Sufficient condition for R&D to be active at S.

    Evaluates the feasible half-and-half plan that just clears the fixed
    cost and compares it with the no-R&D value; when it wins, the optimal
    allocation must carry N > 0.
    """
    if not params.b * S**params.sigma > params.x_bar:
        raise PreconditionError(
            f"requires b*S^sigma > x_bar, got {params.b * S ** params.sigma} "
            f"<= {params.x_bar}")
    sg = params.sigma
    xr = params.x_bar ** (1.0 / sg)
    br = params.b ** (1.0 / sg)
    tech = (br * S / 2.0 + xr / 2.0) ** sg - params.x_bar
    cap = S / 2.0 - xr / (2.0 * br)
    lhs = (params.A_c + params.a * tech) / params.p**params.alpha * cap**params.alpha
    fv, _, _ = eval_F(params, S)
    return lhs > fv


def numeric_dini(f, S: float, side: str = "plus") -> float:
    """One-sided derivative estimate over the fixed step ladder.

    "plus": sup of forward difference quotients; "minus": inf of backward
    quotients. Steps are {1e-3 ... 1e-8} * max(S, 1); backward steps that
    would cross zero are skipped.
    """
    if S <= 0.0:
        raise DomainError(f"S must be > 0, got {S}")
    if side not in ("plus", "minus"):
        raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")
    scale = max(S, 1.0)
    f0 = f(S)
    if not math.isfinite(f0):
        raise NumericalError(f"f({S}) is not finite")
    best = None
    for factor in DINI_STEPS:
        h = factor * scale
        if side == "plus":
            fv = f(S + h)
            if not math.isfinite(fv):
                raise NumericalError(f"f({S + h}) is not finite")
            q = (fv - f0) / h
            if best is None or q > best:
                best = q
        else:
            if h >= S:
                continue
            fv = f(S - h)
            if not math.isfinite(fv):
                raise NumericalError(f"f({S - h}) is not finite")
            q = (f0 - fv) / h
            if best is None or q < best:
                best = q
    if best is None:
        raise NumericalError(f"no valid step for side={side} at S={S}")
    return best


def x2_level(params: Parameters) -> float:
    """Budget level where the R&D branch first matches pure-capital output.

    Diagnostic only: unique root of G_1(x) - A_c*(x/p)**alpha, which is
    strictly increasing beyond the feasibility point.
    """
    d = derived_constants(params)

    def q(x):
        val, _, _ = eval_G1(params, x)
        return val - params.A_c * (x / params.p) ** params.alpha

    lo = d.N_1
    hi = max(2.0 * d.x_1, 1.0)
    while q(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NumericalError("no crossing of the pure-capital technology found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def derived_with_diagnostics(params: Parameters):
    """DerivedConstants with the diagnostic level x_2 filled in."""
    from dataclasses import replace

    return replace(derived_constants(params), x_2=x2_level(params))


def tabulate_G(params: Parameters, s_max: float, n_knots: int = 4001) -> GTable:
    """Dense table of G, its envelope derivative, and argmax components.

    Knots are log-spaced on (0, s_max] with 0 prepended and the structural
    points N_1 and S* inserted so the kink stays sharp under linear
    interpolation.
    """
    if s_max <= 0.0:
        raise DomainError(f"s_max must be > 0, got {s_max}")
    if n_knots < 64:
        raise DomainError(f"n_knots must be >= 64, got {n_knots}")
    d = derived_constants(params)
    s_star = _s_star_or_none(params)
    lo = min(s_max * 1e-12, d.N_1 * 1e-3, 1e-9)
    base = np.geomspace(lo, s_max, n_knots - 1)
    extra = [0.0]
    if d.N_1 < s_max:
        extra.append(d.N_1)
    if s_star is not None and s_star < s_max:
        extra.append(s_star)
    knots = np.unique(np.concatenate([base, np.asarray(extra)]))
    pp = _pack(params)
    if using_numba():
        G, Gp, reg, K, N, H = _k.tabulate(*pp, knots)
    else:
        G, Gp, reg, K, N, H = _knp.tabulate(*pp, knots)
    if not np.all(np.isfinite(G)):
        raise NumericalError("non-finite technology value in table")
    Gp = np.asarray(Gp, dtype=float).copy()
    if knots[0] == 0.0 and not math.isfinite(Gp[0]):
        Gp[0] = Gp[1]  # slope at the origin is infinite; never queried there
    return GTable(knots=knots, G=np.asarray(G, dtype=float),
                  G_prime=Gp, regime=np.asarray(reg),
                  K_c=np.asarray(K, dtype=float), N=np.asarray(N, dtype=float),
                  H=np.asarray(H, dtype=float),
                  s_star=(None if (s_star is None or s_star > s_max) else s_star))
