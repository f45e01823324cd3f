"""Numba and numpy backends must agree and be selectable by env flag."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fdigrowth import _backend
from fdigrowth import technology as tech
from fdigrowth.bellman import GridSpec, vfi
from fdigrowth.oracle import brute_force_G
from fdigrowth.simulate import simulate

HAVE_NUMBA = _backend._numba is not None


@pytest.fixture
def restore_backend():
    before = _backend.active_backend()
    yield
    _backend.set_backend(before)


def _clear_caches():
    tech._s_star_or_none.cache_clear()


def _snapshot(params):
    _clear_caches()
    svals = [0.03, 0.4, 2.5, 60.0]
    out = [tech.eval_G_value(params, s) for s in svals]
    out.append(tech.find_S_star(params))
    alloc = tech.allocate(params, 7.7)
    out += [alloc.K_c, alloc.N, alloc.H, alloc.value]
    out += list(brute_force_G(params, 1.3, 200))
    vf, pol = vfi(params, GridSpec(0.5, 50.0, 64), tol=1e-6, table_points=512)
    traj = simulate(params, pol, 10)
    return np.concatenate([np.asarray(out), vf.values, pol.savings,
                           traj.savings()])


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
class TestBackendAgreement:
    def test_growth_parameter_set(self, growth_params, restore_backend):
        _backend.set_backend("numba")
        a = _snapshot(growth_params)
        _backend.set_backend("numpy")
        b = _snapshot(growth_params)
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)

    def test_trap_parameter_set(self, trap_params, restore_backend):
        _backend.set_backend("numba")
        a = _snapshot(trap_params)
        _backend.set_backend("numpy")
        b = _snapshot(trap_params)
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


class TestEnvSelection:
    def test_numpy_flag(self):
        env = dict(os.environ, FDIGROWTH_BACKEND="numpy")
        out = subprocess.run(
            [sys.executable, "-c",
             "import fdigrowth; print(fdigrowth.active_backend())"],
            capture_output=True, text=True, env=env, check=True)
        assert out.stdout.strip() == "numpy"

    def test_bad_flag_rejected(self):
        env = dict(os.environ, FDIGROWTH_BACKEND="cuda")
        out = subprocess.run(
            [sys.executable, "-c", "import fdigrowth"],
            capture_output=True, text=True, env=env)
        assert out.returncode != 0

    def test_runtime_switch_validates(self):
        with pytest.raises(ValueError):
            _backend.set_backend("fortran")
