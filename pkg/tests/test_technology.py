"""Static technology: the two branches, their envelope, the takeoff
threshold, and the long-run bounds."""

import math
from dataclasses import replace

import numpy as np
import pytest

from fdigrowth import technology as tech
from fdigrowth.errors import DomainError, NumericalError, PreconditionError
from fdigrowth.model import derived_constants, g

from conftest import make_params


def brute_force_constrained_rd(params, S, n=400):
    """3-d scan of the fixed-cost-constrained technology (test-local oracle)."""
    d = derived_constants(params)
    best = -np.inf
    for i in range(n + 1):
        pk = S * i / n
        ka = (pk / params.p) ** params.alpha
        for j in range(n + 1 - i):
            N = S * j / n
            if params.b * N**params.sigma < params.x_bar:
                continue
            H = max(S - pk - N, 0.0)
            val = ((params.A_c + params.a * (params.b * N**params.sigma
                                             - params.x_bar)) * ka
                   + d.w * params.A_h * H**params.alpha_h)
            best = max(best, val)
    return best


class TestEvalF:
    def test_symmetric_split(self, trap_params):
        val, K_c, H = tech.eval_F(trap_params, 2.0)
        assert val == pytest.approx(2.0, rel=1e-12)
        assert K_c == pytest.approx(1.0, rel=1e-10)
        assert H == pytest.approx(1.0, rel=1e-10)

    def test_empty_budget(self, trap_params):
        assert tech.eval_F(trap_params, 0.0)[0] == 0.0

    def test_half_unit(self, trap_params):
        assert tech.eval_F(trap_params, 0.5)[0] == pytest.approx(1.0, rel=1e-12)

    def test_negative_rejected(self, trap_params):
        with pytest.raises(DomainError):
            tech.eval_F(trap_params, -1.0)

    def test_asymmetric_elasticities_against_scan(self):
        p = make_params(a=1.0, b=0.5, x_bar=2.0, alpha_h=0.3, A_h=1.4)
        for S in (0.3, 1.7, 12.0):
            val, K_c, H = tech.eval_F(p, S)
            xs = np.linspace(0.0, S, 20001)
            d = derived_constants(p)
            scan = np.max(p.A_c * (xs / p.p) ** p.alpha
                          + d.w * p.A_h * (S - xs) ** p.alpha_h)
            assert val == pytest.approx(scan, rel=1e-7)

    def test_strictly_concave_and_increasing(self, trap_params):
        S = np.linspace(0.05, 50.0, 60)
        F = np.array([tech.eval_F(trap_params, s)[0] for s in S])
        assert np.all(np.diff(F) > 0)
        assert np.all(np.diff(F, 2) < 0)

    def test_infinite_slope_at_origin(self, trap_params):
        quotients = [tech.eval_F(trap_params, h)[0] / h
                     for h in (1e-2, 1e-4, 1e-6, 1e-8)]
        assert all(b > 3 * a for a, b in zip(quotients, quotients[1:]))


class TestFPrime:
    def test_baseline_points(self, trap_params):
        assert tech.F_prime(trap_params, 2.0) == pytest.approx(0.5, rel=1e-10)
        assert tech.F_prime(trap_params, 0.5) == pytest.approx(1.0, rel=1e-10)

    def test_capital_only(self):
        p = make_params(a=1.0, b=0.5, x_bar=2.0, A_e=0.0)
        assert tech.F_prime(p, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_matches_central_difference(self):
        p = make_params(a=1.0, b=0.5, x_bar=2.0, alpha_h=0.35)
        for S in (0.2, 1.0, 8.0):
            h = 1e-6 * S
            fd = (tech.eval_F(p, S + h)[0] - tech.eval_F(p, S - h)[0]) / (2 * h)
            assert tech.F_prime(p, S) == pytest.approx(fd, rel=1e-6)

    def test_requires_positive(self, trap_params):
        with pytest.raises(DomainError):
            tech.F_prime(trap_params, 0.0)


class TestEvalG1:
    def test_below_feasibility(self, growth_params):
        val, K_c, N = tech.eval_G1(growth_params, 0.01)
        assert val == 0.0 and K_c == 0.0

    def test_corner_branch(self, growth_params):
        d = derived_constants(growth_params)
        x = 0.0216
        assert d.N_1 < x < d.x_1
        val, K_c, N = tech.eval_G1(growth_params, x)
        assert N == d.N_1
        expected = growth_params.A_c * (x - d.N_1) ** growth_params.alpha
        assert val == pytest.approx(expected, rel=1e-12)

    def test_interior_split_residual_and_scan(self, growth_params):
        val, K_c, N = tech.eval_G1(growth_params, 1.0)
        d = derived_constants(growth_params)
        assert d.N_1 < N < 1.0
        p = growth_params
        residual = (p.sigma * p.a * p.b * (1.0 - N) / N
                    + p.alpha * (p.a * p.x_bar - p.A_c) / N**p.sigma
                    - p.alpha * p.a * p.b)
        assert abs(residual) < 1e-9
        ns = np.linspace(d.N_1, 1.0, 20001)[1:-1]
        scan = np.max((p.A_c + p.a * (p.b * ns**p.sigma - p.x_bar))
                      * ((1.0 - ns) / p.p) ** p.alpha)
        assert val == pytest.approx(scan, rel=1e-4)

    def test_negative_rejected(self, growth_params):
        with pytest.raises(DomainError):
            tech.eval_G1(growth_params, -0.5)


class TestEvalG0:
    def test_infeasible_below_minimum_spend(self, growth_params):
        d = derived_constants(growth_params)
        assert tech.eval_G0(growth_params, 0.5 * d.N_1) is None

    def test_against_constrained_scan(self, growth_params):
        val, alloc = tech.eval_G0(growth_params, 1.0)
        scan = brute_force_constrained_rd(growth_params, 1.0, n=400)
        assert val == pytest.approx(scan, rel=1e-3)
        assert val >= scan - 1e-9   # scan is a lower bound

    def test_no_training_sector(self):
        p = make_params(a=50.0, b=20.0, x_bar=2.0, A_e=0.0)
        v0, alloc = tech.eval_G0(p, 3.0)
        v1, K_c, N = tech.eval_G1(p, 3.0)
        assert v0 == pytest.approx(v1, rel=1e-12)
        assert alloc.H == 0.0

    def test_negative_rejected(self, growth_params):
        with pytest.raises(DomainError):
            tech.eval_G0(growth_params, -1.0)


class TestEvalG:
    def test_trap_no_rd_region(self, trap_params):
        # b*2**0.6 = 0.758 < 2, so the R&D branch is infeasible at S = 2
        ev = tech.eval_G(trap_params, 2.0)
        assert ev.G_val == pytest.approx(2.0, rel=1e-12)
        assert ev.regime == tech.NO_RD
        assert ev.G0_val is None

    def test_origin(self, trap_params):
        ev = tech.eval_G(trap_params, 0.0, compute_derivs=False)
        assert ev.G_val == 0.0

    def test_rd_dominates_when_rich(self, growth_params):
        ev = tech.eval_G(growth_params, 100.0, compute_derivs=False)
        assert ev.G0_val > ev.F_val
        assert ev.regime == tech.RD
        assert ev.G_val == ev.G0_val

    def test_envelope_identity(self, growth_params):
        for S in (0.01, 0.024, 0.03, 1.0, 50.0):
            ev = tech.eval_G(growth_params, S, compute_derivs=False)
            g0 = -math.inf if ev.G0_val is None else ev.G0_val
            assert ev.G_val == pytest.approx(max(ev.F_val, g0), rel=1e-12)
            assert ev.G_val >= ev.F_val

    def test_nondecreasing(self, growth_params):
        S = np.geomspace(1e-3, 100.0, 80)
        G = np.array([tech.eval_G_value(growth_params, s) for s in S])
        assert np.all(np.diff(G) >= 0)


class TestAllocate:
    def test_trap_matches_no_rd_split(self, trap_params):
        alloc = tech.allocate(trap_params, 1.0)
        val, K_c, H = tech.eval_F(trap_params, 1.0)
        assert alloc.N == 0.0
        assert alloc.K_c == pytest.approx(K_c, rel=1e-12)
        assert alloc.H == pytest.approx(H, rel=1e-12)

    def test_zero_budget(self, trap_params):
        alloc = tech.allocate(trap_params, 0.0)
        assert (alloc.K_c, alloc.N, alloc.H) == (0.0, 0.0, 0.0)
        assert not alloc.rd_active

    def test_rd_active_when_rich(self, growth_params):
        alloc = tech.allocate(growth_params, 10.0)
        assert alloc.N > 0
        scan = brute_force_constrained_rd(growth_params, 10.0, n=400)
        assert alloc.value == pytest.approx(scan, rel=1e-3)

    def test_budget_exhaustion_and_shares(self, growth_params):
        for S in (0.03, 0.7, 5.0, 300.0):
            al = tech.allocate(growth_params, S)
            budget = growth_params.p * al.K_c + al.N + al.H
            assert budget == pytest.approx(S, rel=1e-8)
            assert al.theta_c + al.theta_n + al.theta_h == pytest.approx(1.0, rel=1e-8)
            for share in (al.theta_c, al.theta_n, al.theta_h):
                assert -1e-12 <= share <= 1.0 + 1e-12
            if al.rd_active:
                assert al.N >= derived_constants(growth_params).N_1

    def test_maximality_certificate(self, growth_params):
        rng = np.random.default_rng(3)
        for S in (0.5, 4.0, 40.0):
            best = tech.eval_G_value(growth_params, S)
            w = rng.random((1000, 3))
            w /= w.sum(axis=1, keepdims=True)
            for kc_share, n_share, h_share in w:
                val = g(growth_params, kc_share * S / growth_params.p,
                        n_share * S, h_share * S)
                assert val <= best * (1 + 1e-9) + 1e-12


class TestTakeoffThreshold:
    def test_unique_crossing(self, growth_params):
        s_star = tech.find_S_star(growth_params)
        f = tech.eval_F(growth_params, s_star)[0]
        g0 = tech.eval_G0(growth_params, s_star)[0]
        assert abs(g0 - f) < 1e-8
        lo = tech.eval_G(growth_params, 0.9 * s_star, compute_derivs=False)
        hi = tech.eval_G(growth_params, 1.1 * s_star, compute_derivs=False)
        assert lo.regime == tech.NO_RD and hi.regime == tech.RD
        assert growth_params.b * s_star**growth_params.sigma > growth_params.x_bar

    def test_below_threshold_equality(self, growth_params):
        s_star = tech.find_S_star(growth_params)
        ev = tech.eval_G(growth_params, 0.5 * s_star, compute_derivs=False)
        assert ev.G_val == ev.F_val
        assert ev.regime == tech.NO_RD

    def test_threshold_falls_with_leverage(self, growth_params):
        s50 = tech.find_S_star(growth_params)
        s100 = tech.find_S_star(replace(growth_params, a=100.0))
        assert s100 < s50

    def test_precondition(self, drs_params):
        with pytest.raises(PreconditionError):
            tech.find_S_star(drs_params)

    def test_difference_strictly_increasing(self, growth_params):
        d = derived_constants(growth_params)
        S = np.geomspace(d.N_1 * 1.001, 100.0, 100)
        diff = []
        for s in S:
            f = tech.eval_F(growth_params, s)[0]
            g0 = tech.eval_G0(growth_params, s)[0]
            diff.append(g0 - f)
        assert np.all(np.diff(diff) > 0)


class TestGrowthBound:
    def test_increasing_in_leverage(self, growth_params):
        assert tech.gamma_bound(replace(growth_params, a=100.0)) \
            > tech.gamma_bound(growth_params)

    def test_increasing_in_research_efficiency(self, growth_params):
        # alpha_h + 1/alpha = 2.5 >= 2 so the bound must rise with b
        assert growth_params.alpha_h + 1.0 / growth_params.alpha >= 2.0
        assert tech.gamma_bound(replace(growth_params, b=40.0)) \
            > tech.gamma_bound(growth_params)

    def test_computed_value_frozen(self, growth_params):
        # checked, not assumed: value recorded after first computation
        gamma = tech.gamma_bound(growth_params)
        assert gamma == pytest.approx(45.7253297517542, rel=1e-10)
        assert growth_params.beta * gamma > 1.0


class TestAsymptoticShares:
    def test_limits(self, growth_params):
        tc, tn, th = tech.asymptotic_shares(growth_params)
        assert (tc, tn, th) == pytest.approx((5 / 11, 6 / 11, 0.0), rel=1e-12)

    def test_symmetric(self):
        p = make_params(a=50.0, b=20.0, x_bar=2.0, sigma=0.5)
        assert tech.asymptotic_shares(p) == pytest.approx((0.5, 0.5, 0.0))

    def test_static_solver_approaches_limits(self, growth_params):
        al = tech.allocate(growth_params, 1e4)
        tc, tn, th = tech.asymptotic_shares(growth_params)
        assert abs(al.theta_c - tc) < 5e-2
        assert abs(al.theta_n - tn) < 5e-2
        assert abs(al.theta_h - th) < 5e-2

    def test_precondition(self, drs_params):
        with pytest.raises(PreconditionError):
            tech.asymptotic_shares(drs_params)


class TestRdLowerBound:
    def test_rich_economy(self, growth_params):
        assert tech.rd_lower_bound_check(growth_params, 100.0)

    def test_vanishing_capital_term(self):
        # leverage barely valid, budget barely feasible: bound fails
        p = make_params(a=0.52, b=0.5001, x_bar=2.0)
        N1 = derived_constants(p).N_1
        assert not tech.rd_lower_bound_check(p, N1 * 1.0001)

    def test_precondition(self, trap_params):
        with pytest.raises(PreconditionError):
            tech.rd_lower_bound_check(trap_params, 1.0)

    def test_consistency_with_oracle(self, growth_params):
        from fdigrowth.oracle import brute_force_G
        for S in (0.1, 1.0, 10.0):
            if tech.rd_lower_bound_check(growth_params, S):
                assert tech.allocate(growth_params, S).N > 0
                _, _, N, _ = brute_force_G(growth_params, S, 400)
                assert N > 0


class TestNumericDini:
    def test_smooth_point(self, trap_params):
        f = lambda s: tech.eval_G_value(trap_params, s)
        assert tech.numeric_dini(f, 2.0, "plus") == pytest.approx(0.5, abs=1e-4)
        assert tech.numeric_dini(f, 2.0, "minus") == pytest.approx(0.5, abs=1e-4)

    def test_kink_at_threshold(self, growth_params):
        s_star = tech.find_S_star(growth_params)
        f = lambda s: tech.eval_G_value(growth_params, s)
        left = tech.numeric_dini(f, s_star, "minus")
        right = tech.numeric_dini(f, s_star, "plus")
        assert right > left
        assert left == pytest.approx(tech.F_prime(growth_params, s_star), rel=1e-3)

    def test_linear_function_exact(self):
        # recovery is exact up to rounding of the smallest step (~eps/1e-8)
        for c in (0.5, 2.0):
            f = lambda s: c * s
            assert abs(tech.numeric_dini(f, 2.0, "plus") - c) < 1e-7
            assert abs(tech.numeric_dini(f, 2.0, "minus") - c) < 1e-7

    def test_rejects_bad_inputs(self, trap_params):
        f = lambda s: s
        with pytest.raises(DomainError):
            tech.numeric_dini(f, 0.0, "plus")
        with pytest.raises(DomainError):
            tech.numeric_dini(f, 1.0, "sideways")
        bad = lambda s: math.inf
        with pytest.raises(NumericalError):
            tech.numeric_dini(bad, 1.0, "plus")


class TestDiagnostics:
    def test_x2_matches_pure_capital(self, growth_params):
        x2 = tech.x2_level(growth_params)
        val, _, _ = tech.eval_G1(growth_params, x2)
        pure = growth_params.A_c * (x2 / growth_params.p) ** growth_params.alpha
        assert val == pytest.approx(pure, rel=1e-9)
        assert growth_params.b * x2**growth_params.sigma > growth_params.x_bar

    def test_derived_with_diagnostics(self, growth_params):
        d = tech.derived_with_diagnostics(growth_params)
        assert d.x_2 is not None and d.x_2 > d.N_1


class TestOracleEquivalence:
    def test_fifty_points_both_parameter_sets(self, trap_params, growth_params):
        # resolution chosen to resolve the tiny post-takeoff training
        # optimum: just above S* the optimal H is ~1e-5*S and the scan needs
        # a grid step below it for its value to be second-order accurate
        from fdigrowth.oracle import brute_force_G
        svals = np.geomspace(1e-2, 1e2, 50)
        for label, params in (("trap", trap_params), ("growth", growth_params)):
            for S in svals:
                n = 3200 if (label == "growth" and S < 0.1) else 800
                solver = tech.eval_G_value(params, float(S))
                oracle = brute_force_G(params, float(S), n)[0]
                gap = abs(solver - oracle) / max(1.0, abs(oracle))
                assert gap <= 1e-3, f"{label}, S={S}, gap={gap}"


class TestGTable:
    def test_matches_pointwise_eval(self, growth_params):
        table = tech.tabulate_G(growth_params, s_max=50.0, n_knots=512)
        for s in (0.01, 0.3, 7.0, 49.0):
            exact = tech.eval_G_value(growth_params, s)
            assert table.g_of(s) == pytest.approx(exact, rel=1e-4)

    def test_kink_is_a_knot(self, growth_params):
        table = tech.tabulate_G(growth_params, s_max=50.0, n_knots=512)
        s_star = tech.find_S_star(growth_params)
        assert table.s_star == pytest.approx(s_star, rel=1e-12)
        assert np.any(table.knots == table.s_star)
