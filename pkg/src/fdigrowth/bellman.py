"""Infinite-horizon savings problem on the resource state, by value function
iteration.

The state is the current resource X (output available for consumption plus
savings); the Bellman operator is

    T V(X) = max_{S' in [0, X]} u(X - S') + beta * V(G(S'))

with V piecewise linear on a log-spaced grid and G evaluated through a dense
precomputed knot table.  After convergence the greedy policy is sharpened by
a guarded bisection on the consumption Euler condition, which removes the
interpolation bias of the piecewise-linear value function around interior
steady states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from . import _kernels_np as _knp
from . import technology as tech
from ._backend import using_numba
from .errors import DomainError, NumericalError
from .model import LOG, Parameters, marginal_utility

MAX_SWEEPS = 100_000
_MIN_GRID = 16


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced resource grid: n points on [x_lo, x_hi]."""

    x_lo: float
    x_hi: float
    n: int


@dataclass(frozen=True)
class ValueFunction:
    """Converged value function, piecewise linear with end clamping."""

    grid: np.ndarray
    values: np.ndarray
    sweeps: int = 0
    sup_changes: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __call__(self, X):
        return np.interp(X, self.grid, self.values)


@dataclass(frozen=True)
class Policy:
    """Savings choice per grid point, piecewise linear between points.

    truncation[k] is True when the optimizer at grid[k] lands on a savings
    level whose image G(S') reaches the top of the grid, i.e. the
    continuation value was clamped there.
    """

    grid: np.ndarray
    savings: np.ndarray
    truncation: np.ndarray

    def __call__(self, X):
        return np.interp(X, self.grid, self.savings)

    @property
    def any_truncation(self) -> bool:
        return bool(np.any(self.truncation))


def _ukind(params: Parameters) -> tuple[int, float]:
    if params.utility == LOG:
        return 0, 0.0
    return 1, float(params.theta)


def _mu(kind: int, theta: float, c):
    c = np.asarray(c, dtype=float)
    if kind == 0:
        return 1.0 / c
    return c ** (-theta)


def solve_bellman_table(kind: int, theta: float, beta: float, grid: np.ndarray,
                        tab_s: np.ndarray, tab_g: np.ndarray,
                        tab_gp: np.ndarray | None, s_star: float | None,
                        tol: float, polish_passes: int = 12,
                        max_sweeps: int = MAX_SWEEPS):
    """Value function iteration on an explicit technology table.

    The stopping rule is the standard contraction bound: iterate until the
    sup-norm change drops below tol*(1-beta)/(2*beta).  Returns
    (V, savings, truncation_flags, sweeps, sup_changes).
    """
    sstar_arg = float("nan") if s_star is None else float(s_star)
    V = np.array([_k.uval(kind, theta, x) for x in grid], dtype=float)
    sup_changes = []
    threshold = tol * (1.0 - beta) / (2.0 * beta)
    pol = np.zeros_like(grid)
    trunc = np.zeros(grid.size, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        if using_numba():
            Vn, pol, trunc = _k.vfi_sweep(V, grid, beta, kind, theta,
                                          sstar_arg, tab_s, tab_g)
        else:
            Vn, pol, trunc = _knp.vfi_sweep(V, grid, beta, kind, theta,
                                            sstar_arg, tab_s, tab_g)
        if not np.all(np.isfinite(Vn)):
            raise NumericalError("non-finite value function during iteration")
        sup = float(np.max(np.abs(Vn - V)))
        sup_changes.append(sup)
        V = Vn
        if sup < threshold:
            break
    else:
        raise NumericalError(f"value iteration did not converge in {max_sweeps} sweeps")

    if polish_passes > 0:
        if tab_gp is None:
            tab_gp = np.gradient(tab_g, tab_s)
        pol = _euler_polish(kind, theta, beta, grid, pol, tab_s, tab_g,
                            tab_gp, s_star, polish_passes)
    return V, pol, trunc, sweeps, np.asarray(sup_changes)


def _euler_polish(kind, theta, beta, grid, pol, tab_s, tab_g, tab_gp,
                  s_star, passes):
    """Refine the greedy policy by bisecting the interior Euler condition.

    Solves u'(X - S) = beta * u'(c(G(S))) * G'(S) per grid point, restricted
    to a bracket of a few value-grid cells around the greedy choice; points
    whose bracket spans the technology kink, lands in the clamped region, or
    shows no sign change keep the golden-section answer.
    """
    X = grid
    n = X.size
    dX = np.diff(X)
    top = X[-1]
    S = pol.copy()
    for _ in range(passes):
        c_knots = X - S
        landing = np.interp(S, tab_s, tab_g)
        gp = np.interp(S, tab_s, tab_gp)
        j = np.clip(np.searchsorted(X, landing) - 1, 0, n - 2)
        width = 1.5 * dX[j] / np.maximum(gp, 1e-300)
        width = np.minimum(np.maximum(width, 1e-9 * np.maximum(S, 1e-300)),
                           0.2 * np.maximum(S, 1e-12))
        lo = np.maximum(S - width, 1e-300)
        hi = np.minimum(S + width, X * (1.0 - 1e-12))
        skip = (S <= 0.0) | (hi <= lo) | (landing >= top * (1.0 - 1e-9))
        if s_star is not None:
            skip |= (lo < s_star) & (s_star < hi)

        def rho(s):
            c_next = np.interp(np.interp(s, tab_s, tab_g), X, c_knots)
            return (_mu(kind, theta, X - s)
                    - beta * _mu(kind, theta, c_next) * np.interp(s, tab_s, tab_gp))

        ok = ~skip & (rho(lo) < 0.0) & (rho(hi) > 0.0)
        if not np.any(ok):
            break
        a = np.where(ok, lo, S)
        b = np.where(ok, hi, S)
        for _ in range(80):
            mid = 0.5 * (a + b)
            pos = rho(mid) > 0.0
            b = np.where(pos, mid, b)
            a = np.where(pos, a, mid)
        S = np.where(ok, 0.5 * (a + b), S)
    return S


def vfi(params: Parameters, grid_spec: GridSpec, tol: float,
        table_points: int = 4001, polish_passes: int = 12
        ) -> tuple[ValueFunction, Policy]:
    """Solve the savings problem on a log-spaced resource grid.

    Builds the dense technology table on [0, x_hi], iterates the Bellman
    operator to the contraction stopping rule, extracts the greedy policy,
    and polishes it on the Euler condition.  Grid points whose optimal
    continuation hits the top of the grid carry a truncation flag.
    """
    if not (grid_spec.x_lo > 0.0):
        raise DomainError(f"x_lo must be > 0, got {grid_spec.x_lo}")
    if not (grid_spec.x_hi > grid_spec.x_lo):
        raise DomainError("x_hi must exceed x_lo")
    if grid_spec.n < _MIN_GRID:
        raise DomainError(f"grid needs at least {_MIN_GRID} points, got {grid_spec.n}")
    if not (tol > 0.0):
        raise DomainError(f"tol must be > 0, got {tol}")

    grid = np.geomspace(grid_spec.x_lo, grid_spec.x_hi, grid_spec.n)
    table = tech.tabulate_G(params, s_max=grid_spec.x_hi, n_knots=table_points)
    kind, theta = _ukind(params)
    V, pol, trunc, sweeps, sups = solve_bellman_table(
        kind, theta, params.beta, grid, table.knots, table.G, table.G_prime,
        table.s_star, tol, polish_passes=polish_passes)
    vf = ValueFunction(grid=grid, values=V, sweeps=sweeps, sup_changes=sups)
    return vf, Policy(grid=grid, savings=pol, truncation=trunc)


@dataclass(frozen=True)
class EulerStep:
    """Two-sided Euler check at one step of a trajectory.

    lower_gap is the margin of beta*u'(c_{t+1})*D-G(S_{t+1}) over u'(c_t);
    upper_gap the margin of u'(c_t) over beta*u'(c_{t+1})*D+G(S_{t+1}).
    Negative relative slack beyond `rel_tol` marks a violation.
    """

    t: int
    mu_now: float
    bound_lower: float
    bound_upper: float
    rel_violation: float
    flagged: bool
    skipped: bool


@dataclass(frozen=True)
class EulerReport:
    steps: tuple[EulerStep, ...]
    rel_tol: float

    @property
    def any_flagged(self) -> bool:
        return any(s.flagged for s in self.steps)

    @property
    def worst_violation(self) -> float:
        vals = [s.rel_violation for s in self.steps if not s.skipped]
        return max(vals) if vals else 0.0


def euler_residual(params: Parameters, traj, rel_tol: float = 5e-3) -> EulerReport:
    """Check the two-sided Euler inequality along a simulated path.

    For each interior step t:

        beta*u'(c_{t+1})*D-G(S_{t+1}) >= u'(c_t) >= beta*u'(c_{t+1})*D+G(S_{t+1})

    with one-sided derivatives estimated by `numeric_dini`.  Boundary steps
    (nonpositive consumption or zero savings) are skipped with a flag rather
    than treated as errors.
    """
    steps = traj.steps
    out = []
    gfun = lambda s: tech.eval_G_value(params, s)
    for i in range(len(steps) - 1):
        st, nxt = steps[i], steps[i + 1]
        s_next = st.S_next
        if st.c <= 0.0 or nxt.c <= 0.0 or s_next <= 0.0:
            out.append(EulerStep(t=st.t, mu_now=math.nan, bound_lower=math.nan,
                                 bound_upper=math.nan, rel_violation=0.0,
                                 flagged=False, skipped=True))
            continue
        mu_now = marginal_utility(params, st.c)
        mu_next = marginal_utility(params, nxt.c)
        d_minus = tech.numeric_dini(gfun, s_next, "minus")
        d_plus = tech.numeric_dini(gfun, s_next, "plus")
        upper = params.beta * mu_next * d_minus   # must be >= mu_now
        lower = params.beta * mu_next * d_plus    # must be <= mu_now
        viol = max(0.0, (mu_now - upper) / mu_now, (lower - mu_now) / mu_now)
        out.append(EulerStep(t=st.t, mu_now=mu_now, bound_lower=lower,
                             bound_upper=upper, rel_violation=viol,
                             flagged=viol > rel_tol, skipped=False))
    return EulerReport(steps=tuple(out), rel_tol=rel_tol)
