"""Shared fixtures: canonical parameter sets and solved scenarios."""

from dataclasses import replace
from types import SimpleNamespace

import pytest

from fdigrowth.bellman import GridSpec, vfi
from fdigrowth.model import Parameters, validate
from fdigrowth.simulate import simulate
from fdigrowth.thresholds import compute_report

BASE = dict(alpha=0.5, alpha_h=0.5, alpha_e=0.5, sigma=0.6, beta=0.96,
            A_c=1.0, A_h=1.0, A_e=2.0, p=1.0, p_n=1.0, utility="log",
            X_0=1.0)

S_B_TRAP = 0.4608     # (alpha*beta*A)**(1/(1-alpha)) with A = sqrt(2)
S_A_TRAP = 0.2304


def make_params(**overrides) -> Parameters:
    kw = dict(BASE)
    kw.update(overrides)
    return validate(Parameters(**kw))


@pytest.fixture(scope="session")
def trap_params():
    return make_params(a=1.0, b=0.5, x_bar=2.0)


@pytest.fixture(scope="session")
def growth_params():
    return make_params(a=50.0, b=20.0, x_bar=2.0)


@pytest.fixture(scope="session")
def drs_params():
    return make_params(a=50.0, b=20.0, x_bar=2.0, sigma=0.4, X_0=0.1)


@pytest.fixture(scope="session")
def trap_solution(trap_params):
    report = compute_report(trap_params)
    vf, pol = vfi(trap_params, GridSpec(1e-3, 5.0, 400), tol=1e-8)
    traj = simulate(trap_params, pol, 200, regime=report.regime)
    return SimpleNamespace(params=trap_params, report=report, vf=vf, pol=pol,
                           traj=traj)


@pytest.fixture(scope="session")
def growth_solution(growth_params):
    report = compute_report(growth_params)
    vf, pol = vfi(growth_params, GridSpec(0.5, 1e12, 400), tol=1e-8)
    traj = simulate(growth_params, pol, 40, regime=report.regime)
    return SimpleNamespace(params=growth_params, report=report, vf=vf, pol=pol,
                           traj=traj)


@pytest.fixture(scope="session")
def growth_low_start_solution(growth_params):
    params = validate(replace(growth_params, X_0=0.02))
    report = compute_report(params)
    vf, pol = vfi(params, GridSpec(1e-3, 1e6, 400), tol=1e-8)
    traj = simulate(params, pol, 30, regime=report.regime)
    return SimpleNamespace(params=params, report=report, vf=vf, pol=pol,
                           traj=traj)


@pytest.fixture(scope="session")
def drs_solution(drs_params):
    report = compute_report(drs_params)
    vf, pol = vfi(drs_params, GridSpec(1e-3, 1e28, 700), tol=1e-8)
    traj = simulate(drs_params, pol, 800, regime=report.regime)
    return SimpleNamespace(params=drs_params, report=report, vf=vf, pol=pol,
                           traj=traj)
