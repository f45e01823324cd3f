"""Vectorised numpy twins of the scalar kernels.

Each routine runs the same fixed-iteration algorithm as its `_kernels`
counterpart, in lockstep across an array of instances, so the two backends
agree to floating-point rounding. Used when the numpy backend is active.
"""

import numpy as np

from ._kernels import (
    BISECT_ITERS,
    GOLDEN_ITERS,
    INVPHI,
    NEG_INF_VALUE,
    REFINE_CAP,
    SEED_POINTS,
)


def f_split(alpha, alpha_h, B1, B2, S):
    """Vectorised capital/training split; S is an array. -> (value, x)."""
    S = np.asarray(S, dtype=float)
    val = np.zeros_like(S)
    x = np.zeros_like(S)
    pos = S > 0.0
    if B2 == 0.0:
        x[pos] = S[pos]
        val[pos] = B1 * S[pos] ** alpha
        return val, x
    if B1 == 0.0:
        val[pos] = B2 * S[pos] ** alpha_h
        return val, x
    if alpha == alpha_h:
        e = 1.0 / (1.0 - alpha)
        share = B1**e / (B1**e + B2**e)
        x[pos] = share * S[pos]
        val[pos] = B1 * x[pos] ** alpha + B2 * (S[pos] - x[pos]) ** alpha_h
        return val, x
    Sp = S[pos]
    lo = np.zeros_like(Sp)
    hi = Sp.copy()
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        take = alpha * B1 * mid ** (alpha - 1.0) > alpha_h * B2 * (Sp - mid) ** (alpha_h - 1.0)
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    xp = 0.5 * (lo + hi)
    x[pos] = xp
    val[pos] = B1 * xp**alpha + B2 * (Sp - xp) ** alpha_h
    return val, x


def f_prime(alpha, alpha_h, B1, B2, S):
    S = np.asarray(S, dtype=float)
    out = np.full_like(S, np.inf)
    pos = S > 0.0
    if B2 == 0.0:
        out[pos] = alpha * B1 * S[pos] ** (alpha - 1.0)
        return out
    _, x = f_split(alpha, alpha_h, B1, B2, S[pos])
    H = S[pos] - x
    corner = H <= 1e-9 * S[pos]
    res = np.where(corner,
                   alpha * B1 * np.where(x > 0.0, x, 1.0) ** (alpha - 1.0),
                   alpha_h * B2 * np.where(H > 0.0, H, 1.0) ** (alpha_h - 1.0))
    out[pos] = res
    return out


def g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x):
    """Vectorised fixed-cost R&D split. -> (value, K_c, N) arrays."""
    x = np.asarray(x, dtype=float)
    val = np.zeros_like(x)
    K = np.zeros_like(x)
    N = np.where(x <= N1, x, N1)

    mid_branch = (x > N1) & (x <= x1)
    if np.any(mid_branch):
        Km = (x[mid_branch] - N1) / p
        K[mid_branch] = Km
        val[mid_branch] = A_c * Km**alpha

    hi_branch = x > x1
    if np.any(hi_branch):
        xh = x[hi_branch]
        sab = sigma * a * b
        aab = alpha * a * b
        ad = alpha * (a * x_bar - A_c)
        lo = np.full_like(xh, N1)
        hi = xh.copy()
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            take = sab * (xh - mid) / mid + ad / mid**sigma - aab > 0.0
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        Nh = 0.5 * (lo + hi)
        Kh = (xh - Nh) / p
        N[hi_branch] = Nh
        K[hi_branch] = Kh
        val[hi_branch] = (A_c + a * (b * Nh**sigma - x_bar)) * Kh**alpha
    return val, K, N


def g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mid_branch = (x > N1) & (x <= x1)
    out[mid_branch] = alpha * A_c * (x[mid_branch] - N1) ** (alpha - 1.0) / p**alpha
    hi_branch = x > x1
    if np.any(hi_branch):
        _, K, N = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x[hi_branch])
        out[hi_branch] = sigma * a * b * N ** (sigma - 1.0) * K**alpha
    return out


def _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah, N1, x1, S, x):
    val, _, _ = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, x)
    rem = np.maximum(S - x, 0.0)
    return val + wah * rem**alpha_h


def g0_solve(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, S):
    """Vectorised constrained-R&D technology.

    Returns (feasible, value, x, K_c, N, H) arrays over the S array.
    """
    S = np.asarray(S, dtype=float)
    m = S.size
    feas = S >= N1
    val = np.zeros(m)
    xb = np.zeros(m)
    K = np.zeros(m)
    N = np.zeros(m)
    H = np.zeros(m)

    wah = w * A_h
    if wah == 0.0:
        idx = feas
        v, k, n = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, S[idx])
        val[idx] = v
        xb[idx] = S[idx]
        K[idx] = k
        N[idx] = n
        return feas, val, xb, K, N, H

    work = feas & (S > N1)
    degen = feas & ~work  # S == N1 exactly
    xb[degen] = N1
    N[degen] = N1

    if not np.any(work):
        return feas, val, xb, K, N, H

    Sw = S[work]
    mw = Sw.size
    span = Sw - N1

    tgrid = np.arange(SEED_POINTS) / (SEED_POINTS - 1.0)
    xs = N1 + span[:, None] * tgrid[None, :]              # (mw, 64)
    fs = _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah,
                       N1, x1, Sw[:, None], xs)
    best_j = np.argmax(fs, axis=1)
    rows = np.arange(mw)
    best_f = fs[rows, best_j]
    best_x = xs[rows, best_j]

    # local maxima of the scan, strongest first, capped at REFINE_CAP
    left_ok = np.ones_like(fs, dtype=bool)
    left_ok[:, 1:] = fs[:, 1:] >= fs[:, :-1]
    right_ok = np.ones_like(fs, dtype=bool)
    right_ok[:, :-1] = fs[:, :-1] >= fs[:, 1:]
    is_lm = left_ok & right_ok
    fs_masked = np.where(is_lm, fs, -np.inf)
    order = np.argsort(-fs_masked, axis=1, kind="stable")[:, :REFINE_CAP]
    # pad rows with fewer local maxima by repeating the global best seed
    padded = ~np.take_along_axis(is_lm, order, axis=1)
    order = np.where(padded, best_j[:, None], order)

    jl = np.maximum(order - 1, 0)
    jr = np.minimum(order + 1, SEED_POINTS - 1)
    aa = np.take_along_axis(xs, jl, axis=1)               # (mw, REFINE_CAP)
    bb = np.take_along_axis(xs, jr, axis=1)
    Scol = Sw[:, None]

    h = bb - aa
    c = bb - INVPHI * h
    d = aa + INVPHI * h
    fc = _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah,
                       N1, x1, Scol, c)
    fd = _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah,
                       N1, x1, Scol, d)

    def _track(pts, fvals, best_f, best_x):
        cand_j = np.argmax(fvals, axis=1)
        cand_f = fvals[rows, cand_j]
        cand_x = pts[rows, cand_j]
        better = cand_f > best_f
        return np.where(better, cand_f, best_f), np.where(better, cand_x, best_x)

    best_f, best_x = _track(c, fc, best_f, best_x)
    best_f, best_x = _track(d, fd, best_f, best_x)
    for _ in range(GOLDEN_ITERS):
        take = fc > fd
        c_old = c
        d_old = d
        fc_old = fc
        fd_old = fd
        bb = np.where(take, d, bb)
        aa = np.where(take, aa, c)
        h = bb - aa
        newpt = np.where(take, bb - INVPHI * h, aa + INVPHI * h)
        fnew = _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah,
                             N1, x1, Scol, newpt)
        c = np.where(take, newpt, d_old)
        fc = np.where(take, fnew, fd_old)
        d = np.where(take, c_old, newpt)
        fd = np.where(take, fc_old, fnew)
        best_f, best_x = _track(newpt, fnew, best_f, best_x)

    # first-order-condition polish inside one seed gap of the winner
    gap = span / (SEED_POINTS - 1.0)
    lo = np.maximum(best_x - gap, N1)
    hi = np.minimum(best_x + gap, Sw)

    def _psi(xq):
        gp = g1_prime(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, xq)
        rem = np.maximum(Sw - xq, 0.0)
        with np.errstate(divide="ignore"):
            term = alpha_h * wah * np.where(rem > 0.0, rem, 1.0) ** (alpha_h - 1.0)
        return np.where(rem > 0.0, gp - term, -np.inf)

    s_lo = np.where(lo <= N1 * (1.0 + 1e-15), np.inf, _psi(lo))
    s_hi = np.where(hi >= Sw * (1.0 - 1e-15), -np.inf, _psi(hi))
    ok = (s_lo > 0.0) & (s_hi < 0.0)
    if np.any(ok):
        plo = np.where(ok, lo, best_x)
        phi_ = np.where(ok, hi, best_x)
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (plo + phi_)
            pos = _psi(mid) > 0.0
            plo = np.where(pos, mid, plo)
            phi_ = np.where(pos, phi_, mid)
        xp = 0.5 * (plo + phi_)
        fp = _g0_objective(alpha, alpha_h, sigma, A_c, a, b, x_bar, p, wah,
                           N1, x1, Sw, xp)
        better = ok & (fp >= best_f)
        best_f = np.where(better, fp, best_f)
        best_x = np.where(better, xp, best_x)

    v, k, n = g1_solve(alpha, sigma, A_c, a, b, x_bar, p, N1, x1, best_x)
    Hw = np.maximum(Sw - best_x, 0.0)
    val[work] = v + wah * Hw**alpha_h
    xb[work] = best_x
    K[work] = k
    N[work] = n
    H[work] = Hw
    return feas, val, xb, K, N, H


def g_point(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, S):
    """Vectorised static technology. Mirrors `_kernels.g_point` over arrays.

    Returns (G, F, G0, feasible, regime, K_c, N, H, G_prime).
    """
    S = np.asarray(S, dtype=float)
    B1 = A_c / p**alpha
    B2 = w * A_h
    fv, xf = f_split(alpha, alpha_h, B1, B2, S)
    feas, g0v, xg, Kg, Ng, Hg = g0_solve(alpha, alpha_h, sigma, A_c, A_h, a, b,
                                         x_bar, p, w, N1, x1, S)
    rd = feas & (g0v > fv)
    G = np.where(rd, g0v, fv)
    K = np.where(rd, Kg, xf / p)
    N = np.where(rd, Ng, 0.0)
    H = np.where(rd, Hg, S - xf)
    with np.errstate(divide="ignore", invalid="ignore"):
        gp_rd = sigma * a * b * np.where(Ng > 0.0, Ng, 1.0) ** (sigma - 1.0) * Kg**alpha
    Gp = np.where(rd, gp_rd, f_prime(alpha, alpha_h, B1, B2, S))
    G0 = np.where(feas, g0v, np.nan)
    return G, fv, G0, feas, rd.astype(np.int64), K, N, H, Gp


def tabulate(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, knots):
    G, F, G0, feas, reg, K, N, H, Gp = g_point(
        alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, N1, x1, knots)
    return G, Gp, reg, K, N, H


def bf_simplex(alpha, alpha_h, sigma, A_c, A_h, a, b, x_bar, p, w, S, n):
    """Exhaustive simplex max, vectorised over the whole grid at once."""
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (i + j) <= n
    i = i[keep]
    j = j[keep]
    Kc = (S * i / n) / p
    N = S * j / n
    H = np.maximum(S - S * i / n - N, 0.0)
    rd = b * N**sigma - x_bar
    tfp = np.where(rd > 0.0, A_c + a * rd, A_c)
    val = tfp * Kc**alpha + w * A_h * H**alpha_h
    k = int(np.argmax(val))
    return float(val[k]), float(Kc[k]), float(N[k]), float(H[k])


def vfi_sweep(V, grid, beta, kind, theta, s_star, tabS, tabG):
    """Lockstep Bellman sweep over the whole grid. Mirrors `_kernels.vfi_sweep`."""
    n = grid.size
    X = grid
    upper = X * (1.0 - 1e-12)
    c4 = 0.0 if not np.isfinite(s_star) else s_star
    cands = np.empty((n, 6))
    cands[:, 0] = 0.0
    cands[:, 1] = 0.25 * X
    cands[:, 2] = 0.5 * X
    cands[:, 3] = 0.75 * X
    cands[:, 4] = np.clip(c4, 0.0, upper)
    cands[:, 5] = upper
    cands.sort(axis=1)

    def _u(c):
        out = np.full_like(c, NEG_INF_VALUE)
        pos = c > 0.0
        if kind == 0:
            out[pos] = np.log(c[pos])
        else:
            out[pos] = c[pos] ** (1.0 - theta) / (1.0 - theta)
        return out

    def _phi2(s):
        gv = np.interp(s, tabS, tabG)
        return _u(X[:, None] - s) + beta * np.interp(gv, grid, V)

    fcand = _phi2(cands)
    rows = np.arange(n)
    best_j = np.argmax(fcand, axis=1)
    best_f = fcand[rows, best_j]
    best_s = cands[rows, best_j]

    jl = np.maximum(best_j - 1, 0)
    jr = np.minimum(best_j + 1, 5)
    aa = cands[rows, jl]
    bb = cands[rows, jr]

    def _phi1(s):
        gv = np.interp(s, tabS, tabG)
        return _u(X - s) + beta * np.interp(gv, grid, V)

    h = bb - aa
    c = bb - INVPHI * h
    d = aa + INVPHI * h
    fc = _phi1(c)
    fd = _phi1(d)
    for pts, fvals in ((c, fc), (d, fd)):
        better = fvals > best_f
        best_f = np.where(better, fvals, best_f)
        best_s = np.where(better, pts, best_s)
    for _ in range(GOLDEN_ITERS):
        take = fc > fd
        c_old = c
        d_old = d
        fc_old = fc
        fd_old = fd
        bb = np.where(take, d, bb)
        aa = np.where(take, aa, c)
        h = bb - aa
        newpt = np.where(take, bb - INVPHI * h, aa + INVPHI * h)
        fnew = _phi1(newpt)
        c = np.where(take, newpt, d_old)
        fc = np.where(take, fnew, fd_old)
        d = np.where(take, c_old, newpt)
        fd = np.where(take, fc_old, fnew)
        better = fnew > best_f
        best_f = np.where(better, fnew, best_f)
        best_s = np.where(better, newpt, best_s)

    trunc = np.interp(best_s, tabS, tabG) >= X[-1] * (1.0 - 1e-9)
    return best_f, best_s, trunc
