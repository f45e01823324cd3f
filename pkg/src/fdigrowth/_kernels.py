"""Scalar hot-path kernels, numba-compiled when available.

Every routine here uses fixed iteration counts so the vectorised numpy
twins in `_kernels_np` perform the same arithmetic and agree to rounding.
Shared conventions:

* bisections run `BISECT_ITERS` halvings on a monotone residual,
* golden-section searches run `GOLDEN_ITERS` updates and track the best
  point ever evaluated,
* the outer training/R&D split is seeded with `SEED_POINTS` uniform
  points and refined around at most `REFINE_CAP` local maxima of the scan.
"""

import math

import numpy as np

from ._backend import maybe_njit

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
BISECT_ITERS = 90
GOLDEN_ITERS = 64
SEED_POINTS = 64
REFINE_CAP = 6
NEG_INF_VALUE = -1e300


@maybe_njit
def f_split(alpha, alpha_h, B1, B2, S):
    """max B1*x**alpha + B2*(S-x)**alpha_h over x in [0, S] -> (value, x).

    B1 = A_c/p**alpha is the capital coefficient, B2 = w*A_h the training
    coefficient. Closed form when the two elasticities coincide, interior
    first-order-condition bisection otherwise.
    """
    if S <= 0.0:
        return 0.0, 0.0
    if B2 == 0.0:
        return B1 * S**alpha, S
    if B1 == 0.0:
        return B2 * S**alpha_h, 0.0
    if alpha == alpha_h:
        e = 1.0 / (1.0 - alpha)
        r1 = B1**e
        x = S * r1 / (r1 + B2**e)
        return B1 * x**alpha + B2 * (S - x) ** alpha_h, x
    lo = 0.0
    hi = S
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        lhs = alpha * B1 * mid ** (alpha - 1.0)
        rhs = alpha_h * B2 * (S - mid) ** (alpha_h - 1.0)
        if lhs > rhs:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return B1 * x**alpha + B2 * (S - x) ** alpha_h, x


@maybe_njit
def f_prime(alpha, alpha_h, B1, B2, S):
    """Envelope derivative of f_split's value in S; +inf at S == 0.

    When one input's optimal share falls below float resolution the split
    sits at a corner and the binding branch's own derivative is used.
    """
    if S <= 0.0:
        return np.inf
    if B2 == 0.0:
        return alpha * B1 * S ** (alpha - 1.0)
    val, x = f_split(alpha, alpha_h, B1, B2, S)
    H = S - x
    if H <= 1e-9 * S:
        return alpha * B1 * x ** (alpha - 1.0)
    return alpha_h * B2 * H ** (alpha_h - 1.0)


@maybe_njit
def g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x):
    """R&D/capital split of a budget x under the fixed-cost constraint.

    Returns (value, K_c, N). Zero output below N1; corner N = N1 up to x1;
    above x1 the interior split solves
        sigma*a*b*(x-N)/N + alpha*(a*x_bar - A_c)/N**sigma - alpha*a*b = 0,
    whose left side is strictly decreasing in N, by bisection on (N1, x).
    """
    if x <= N1:
        return 0.0, 0.0, x
    if x <= x1:
        K = (x - N1) / p
        return A_c * K**alpha, K, N1
    sab = sigma * a * b
    aab = alpha * a * b
    ad = alpha * (a * x_bar - A_c)
    lo = N1
    hi = x
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if sab * (x - mid) / mid + ad / mid**sigma - aab > 0.0:
            lo = mid
        else:
            hi = mid
    N = 0.5 * (lo + hi)
    K = (x - N) / p
    val = (A_c + a * (b * N**sigma - x_bar)) * K**alpha
    return val, K, N


@maybe_njit
def g1_residual(alpha, sigma, a, b, x_bar, A_c, x, N):
    """Residual of the interior split condition at (x, N)."""
    return (sigma * a * b * (x - N) / N
            + alpha * (a * x_bar - A_c) / N**sigma
            - alpha * a * b)


@maybe_njit
def g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x):
    """One-sided derivative of the R&D-branch value; 0 on the dead segment."""
    if x <= N1:
        return 0.0
    if x <= x1:
        return alpha * A_c * (x - N1) ** (alpha - 1.0) / p**alpha
    val, K, N = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x)
    return sigma * a * b * N ** (sigma - 1.0) * K**alpha


@maybe_njit
def g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, wah, N1, x1, S, x):
    """R&D-branch value of budget x plus training value of the remainder."""
    val, K, N = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x)
    rem = S - x
    if rem < 0.0:
        rem = 0.0
    return val + wah * rem**alpha_h


@maybe_njit
def g0_solve(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, S):
    """Constrained-R&D technology value and allocation.

    Returns (feasible, value, x, K_c, N, H). Infeasible (flag 0) when the
    budget cannot even meet the fixed cost (S < N1). Otherwise maximises
    g1(x) + w*A_h*(S-x)**alpha_h over x in [N1, S]: 64-point seed scan,
    golden-section refinement around scan local maxima, then a bisection
    polish on the first-order condition near the winner.
    """
    if S < N1:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0
    wah = w * A_h
    if wah == 0.0:
        val, K, N = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, S)
        return 1, val, S, K, N, 0.0
    span = S - N1
    if span <= 0.0:
        return 1, 0.0, N1, 0.0, N1, 0.0

    xs = np.empty(SEED_POINTS)
    fs = np.empty(SEED_POINTS)
    best_f = NEG_INF_VALUE
    best_x = N1
    for j in range(SEED_POINTS):
        xj = N1 + span * j / (SEED_POINTS - 1.0)
        fj = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p,
                          wah, N1, x1, S, xj)
        xs[j] = xj
        fs[j] = fj
        if fj > best_f:
            best_f = fj
            best_x = xj

    # local maxima of the scan, strongest first, capped
    lm = np.empty(SEED_POINTS, np.int64)
    n_lm = 0
    for j in range(SEED_POINTS):
        left_ok = j == 0 or fs[j] >= fs[j - 1]
        right_ok = j == SEED_POINTS - 1 or fs[j] >= fs[j + 1]
        if left_ok and right_ok:
            lm[n_lm] = j
            n_lm += 1
    n_ref = n_lm if n_lm < REFINE_CAP else REFINE_CAP
    used = np.zeros(n_lm, np.bool_)
    for _ in range(n_ref):
        pick = -1
        pick_f = NEG_INF_VALUE
        for i in range(n_lm):
            if not used[i] and fs[lm[i]] > pick_f:
                pick = i
                pick_f = fs[lm[i]]
        if pick < 0:
            break
        used[pick] = True
        j = lm[pick]
        jl = j - 1 if j > 0 else 0
        jr = j + 1 if j < SEED_POINTS - 1 else SEED_POINTS - 1
        aa = xs[jl]
        bb = xs[jr]
        h = bb - aa
        c = bb - INVPHI * h
        d = aa + INVPHI * h
        fc = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p,
                          wah, N1, x1, S, c)
        fd = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p,
                          wah, N1, x1, S, d)
        if fc > best_f:
            best_f = fc
            best_x = c
        if fd > best_f:
            best_f = fd
            best_x = d
        for _ in range(GOLDEN_ITERS):
            if fc > fd:
                bb = d
                d = c
                fd = fc
                h = bb - aa
                c = bb - INVPHI * h
                fc = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b,
                                  x_bar, p, wah, N1, x1, S, c)
                if fc > best_f:
                    best_f = fc
                    best_x = c
            else:
                aa = c
                c = d
                fc = fd
                h = bb - aa
                d = aa + INVPHI * h
                fd = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b,
                                  x_bar, p, wah, N1, x1, S, d)
                if fd > best_f:
                    best_f = fd
                    best_x = d

    # first-order-condition polish inside one seed gap of the winner
    gap = span / (SEED_POINTS - 1.0)
    lo = best_x - gap
    hi = best_x + gap
    if lo < N1:
        lo = N1
    if hi > S:
        hi = S
    s_lo = np.inf if lo <= N1 * (1.0 + 1e-15) else (
        g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, lo)
        - alpha_h * wah * (S - lo) ** (alpha_h - 1.0))
    s_hi = -np.inf if hi >= S * (1.0 - 1e-15) else (
        g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, hi)
        - alpha_h * wah * (S - hi) ** (alpha_h - 1.0))
    if s_lo > 0.0 > s_hi:
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            psi = (g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, mid)
                   - alpha_h * wah * (S - mid) ** (alpha_h - 1.0))
            if psi > 0.0:
                lo = mid
            else:
                hi = mid
        xp = 0.5 * (lo + hi)
        fp = g0_objective(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p,
                          wah, N1, x1, S, xp)
        if fp >= best_f:
            best_f = fp
            best_x = xp

    val, K, N = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, best_x)
    H = S - best_x
    if H < 0.0:
        H = 0.0
    return 1, val + wah * H**alpha_h, best_x, K, N, H


@maybe_njit
def g_point(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, S):
    """Full static technology at one savings level.

    Returns (G, F, G0, g0_feasible, regime, K_c, N, H, G_prime) where regime
    is 1 when the R&D branch strictly dominates, 0 otherwise (ties keep the
    no-R&D split), and G_prime is the envelope derivative of the winning
    branch.
    """
    B1 = A_c / p**alpha
    B2 = w * A_h
    fv, xf = f_split(alpha, alpha_h, B1, B2, S)
    ok, g0v, xg, Kg, Ng, Hg = g0_solve(alpha, alpha_h, sigma, A_c, A_h, a, b,
                                       x_bar, p, w, N1, x1, S)
    if ok == 1 and g0v > fv:
        Gp = sigma * a * b * Ng ** (sigma - 1.0) * Kg**alpha
        return g0v, fv, g0v, 1, 1, Kg, Ng, Hg, Gp
    g0_out = g0v if ok == 1 else np.nan
    Gp = f_prime(alpha, alpha_h, B1, B2, S)
    return fv, fv, g0_out, ok, 0, xf / p, 0.0, S - xf, Gp


@maybe_njit
def tabulate(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, knots):
    """Evaluate the static technology on a knot array (for interpolation)."""
    m = knots.size
    G = np.empty(m)
    Gp = np.empty(m)
    reg = np.zeros(m, np.int64)
    Kc = np.empty(m)
    N = np.empty(m)
    H = np.empty(m)
    for i in range(m):
        gi, fi, g0i, oki, ri, ki, ni, hi, gpi = g_point(
            alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, knots[i])
        G[i] = gi
        Gp[i] = gpi
        reg[i] = ri
        Kc[i] = ki
        N[i] = ni
        H[i] = hi
    return G, Gp, reg, Kc, N, H


@maybe_njit
def bf_simplex(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, S, n):
    """Exhaustive max of one-period output over the budget simplex.

    Grid {(i/n, j/n): i + j <= n} maps to (p*K_c, N) with H the remainder.
    Returns (value, K_c, N, H).
    """
    wah = w * A_h
    best = -1.0
    bi = 0
    bj = 0
    for i in range(n + 1):
        kc = (S * i / n) / p
        ka = kc**alpha
        rest = S - S * i / n
        for j in range(n + 1 - i):
            Nv = S * j / n
            Hv = rest - Nv
            if Hv < 0.0:
                Hv = 0.0
            rd = b * Nv**sigma - x_bar
            tfp = A_c + a * rd if rd > 0.0 else A_c
            val = tfp * ka + wah * Hv**alpha_h
            if val > best:
                best = val
                bi = i
                bj = j
    Kc = (S * bi / n) / p
    Nn = S * bj / n
    Hh = S - S * bi / n - Nn
    if Hh < 0.0:
        Hh = 0.0
    return best, Kc, Nn, Hh


@maybe_njit
def interp(xs, ys, v):
    """Piecewise-linear interpolation with end clamping (np.interp semantics)."""
    n = xs.size
    if v <= xs[0]:
        return ys[0]
    if v >= xs[n - 1]:
        return ys[n - 1]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= v:
            lo = mid
        else:
            hi = mid
    t = (v - xs[lo]) / (xs[lo + 1] - xs[lo])
    return ys[lo] + t * (ys[lo + 1] - ys[lo])


@maybe_njit
def uval(kind, theta, c):
    """Utility guarded for the optimizer: nonpositive consumption is -1e300."""
    if c <= 0.0:
        return NEG_INF_VALUE
    if kind == 0:
        return math.log(c)
    return c ** (1.0 - theta) / (1.0 - theta)


@maybe_njit
def bellman_objective(kind, theta, beta, grid, V, tabS, tabG, X, s):
    gv = interp(tabS, tabG, s)
    return uval(kind, theta, X - s) + beta * interp(grid, V, gv)


@maybe_njit
def vfi_sweep(V, grid, beta, kind, theta, s_star, tabS, tabG):
    """One Bellman sweep: golden-section inner maximisation per grid point.

    Candidates are the quartile seeds, the technology kink location, and the
    budget corners; the bracket around the best candidate is refined by
    golden section. Returns (V_new, savings_choice, truncation_flags).
    """
    n = grid.size
    Vn = np.empty(n)
    pol = np.empty(n)
    trunc = np.zeros(n, np.bool_)
    xhi = grid[n - 1]
    cands = np.empty(6)
    for k in range(n):
        X = grid[k]
        upper = X * (1.0 - 1e-12)
        c4 = s_star
        if not (c4 == c4):
            c4 = 0.0
        if c4 > upper:
            c4 = upper
        if c4 < 0.0:
            c4 = 0.0
        cands[0] = 0.0
        cands[1] = 0.25 * X
        cands[2] = 0.5 * X
        cands[3] = 0.75 * X
        cands[4] = c4
        cands[5] = upper
        # insertion sort of the 6 candidates
        for ii in range(1, 6):
            key = cands[ii]
            jj = ii - 1
            while jj >= 0 and cands[jj] > key:
                cands[jj + 1] = cands[jj]
                jj -= 1
            cands[jj + 1] = key
        best_f = NEG_INF_VALUE
        best_s = 0.0
        best_j = 0
        for j in range(6):
            fj = bellman_objective(kind, theta, beta, grid, V, tabS, tabG,
                                   X, cands[j])
            if fj > best_f:
                best_f = fj
                best_s = cands[j]
                best_j = j
        lo = cands[best_j - 1] if best_j > 0 else cands[0]
        hi = cands[best_j + 1] if best_j < 5 else cands[5]
        aa = lo
        bb = hi
        h = bb - aa
        c = bb - INVPHI * h
        d = aa + INVPHI * h
        fc = bellman_objective(kind, theta, beta, grid, V, tabS, tabG, X, c)
        fd = bellman_objective(kind, theta, beta, grid, V, tabS, tabG, X, d)
        if fc > best_f:
            best_f = fc
            best_s = c
        if fd > best_f:
            best_f = fd
            best_s = d
        for _ in range(GOLDEN_ITERS):
            if fc > fd:
                bb = d
                d = c
                fd = fc
                h = bb - aa
                c = bb - INVPHI * h
                fc = bellman_objective(kind, theta, beta, grid, V, tabS, tabG,
                                       X, c)
                if fc > best_f:
                    best_f = fc
                    best_s = c
            else:
                aa = c
                c = d
                fc = fd
                h = bb - aa
                d = aa + INVPHI * h
                fd = bellman_objective(kind, theta, beta, grid, V, tabS, tabG,
                                       X, d)
                if fd > best_f:
                    best_f = fd
                    best_s = d
        Vn[k] = best_f
        pol[k] = best_s
        trunc[k] = interp(tabS, tabG, best_s) >= xhi * (1.0 - 1e-9)
    return Vn, pol, trunc
