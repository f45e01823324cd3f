"""Independent brute-force verifiers for the static solver and the VFI.

These deliberately avoid the solvers they certify: the static oracle is an
exhaustive scan of the budget simplex, the dynamic oracle is finite-horizon
backward induction with the inner maximisation restricted to grid points.
Both are meant for small instances (CI-sized) only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from . import _kernels_np as _knp
from . import technology as tech
from ._backend import using_numba
from .errors import DomainError
from .model import LOG, Parameters
from .technology import _pack


@dataclass(frozen=True)
class OracleReport:
    """Comparison of a solver value against its brute-force oracle."""

    target: str
    instance: str
    oracle_value: float
    solver_value: float
    rel_gap: float
    argmax_gap: tuple[float, ...]


def brute_force_G(params: Parameters, S: float, n: int
                  ) -> tuple[float, float, float, float]:
    """Exhaustive max of one-period output over the budget simplex.

    The grid {(i/n, j/n): i + j <= n} maps to (p*K_c, N), training takes the
    remainder. Error in the argmax is O(S/n) per coordinate; the value error
    is second order at interior optima. Returns (value, K_c, N, H).
    """
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    if n < 200:
        raise DomainError(f"n must be >= 200, got {n}")
    pp = _pack(params)[:10]
    if using_numba():
        val, K, N, H = _k.bf_simplex(*pp, float(S), n)
    else:
        val, K, N, H = _knp.bf_simplex(*pp, float(S), n)
    return float(val), float(K), float(N), float(H)


def compare_static(params: Parameters, S: float, n: int) -> OracleReport:
    """Run both routes on one instance and report the relative gap."""
    val, K, N, H = brute_force_G(params, S, n)
    alloc = tech.allocate(params, S)
    rel = abs(val - alloc.value) / max(1.0, abs(val))
    return OracleReport(
        target="static_technology", instance=f"S={S!r}, n={n}",
        oracle_value=val, solver_value=alloc.value, rel_gap=rel,
        argmax_gap=(abs(K - alloc.K_c), abs(N - alloc.N), abs(H - alloc.H)))


def brute_force_dp(params: Parameters, grid: np.ndarray, T: int) -> np.ndarray:
    """Finite-horizon backward induction with grid-restricted choices.

    Horizon T means T consumption periods with terminal value zero, so
    T = 1 is "consume everything". Savings choices are grid points (plus
    zero) at or below the current resource; continuation values are
    interpolated linearly, the same scheme the VFI uses. Returns the
    horizon-T value on the grid.
    """
    if T < 1 or T > 8:
        raise DomainError(f"T must be in [1, 8], got {T}")
    grid = np.asarray(grid, dtype=float)
    if grid.size > 100:
        raise DomainError(f"oracle grid capped at 100 points, got {grid.size}")
    g_at = np.array([tech.eval_G_value(params, s) for s in grid])

    if params.utility == LOG:
        def u(c):
            return np.where(c > 0.0, np.log(np.where(c > 0.0, c, 1.0)), -np.inf)
    else:
        th = params.theta

        def u(c):
            return np.where(c > 0.0,
                            np.where(c > 0.0, c, 1.0) ** (1.0 - th) / (1.0 - th),
                            -np.inf)

    n = grid.size
    V = np.zeros(n)
    cand_s = np.concatenate([[0.0], grid])          # savings candidates
    cand_g = np.concatenate([[0.0], g_at])
    for _ in range(T):
        Vn = np.empty(n)
        cont = np.interp(cand_g, grid, V)
        for i in range(n):
            feas = cand_s <= grid[i]
            c = grid[i] - cand_s[feas]
            vals = u(c) + params.beta * cont[feas]
            Vn[i] = np.max(vals)
        V = Vn
    return V
