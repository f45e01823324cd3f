"""Benchmark the numba kernels against the vectorised numpy fallback.

Times three hot paths on a medium instance: the dense technology table,
the brute-force simplex oracle, and a full value-function-iteration solve.

    python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from fdigrowth import _backend
from fdigrowth import technology as tech
from fdigrowth.bellman import GridSpec, vfi
from fdigrowth.model import Parameters, validate
from fdigrowth.oracle import brute_force_G

GROWTH = validate(Parameters(
    alpha=0.5, alpha_h=0.5, alpha_e=0.5, sigma=0.6, beta=0.96,
    A_c=1.0, A_h=1.0, A_e=2.0, a=50.0, b=20.0, x_bar=2.0,
    p=1.0, p_n=1.0, utility="log", X_0=1.0))
TRAP = validate(Parameters(
    alpha=0.5, alpha_h=0.5, alpha_e=0.5, sigma=0.6, beta=0.96,
    A_c=1.0, A_h=1.0, A_e=2.0, a=1.0, b=0.5, x_bar=2.0,
    p=1.0, p_n=1.0, utility="log", X_0=1.0))


def bench_table():
    tech._s_star_or_none.cache_clear()
    t0 = time.perf_counter()
    table = tech.tabulate_G(GROWTH, s_max=1e6, n_knots=2001)
    dt = time.perf_counter() - t0
    return dt, float(np.sum(table.G))


def bench_bruteforce():
    t0 = time.perf_counter()
    acc = 0.0
    for S in (0.5, 5.0, 50.0):
        acc += brute_force_G(GROWTH, S, 800)[0]
    return time.perf_counter() - t0, acc


def bench_vfi():
    tech._s_star_or_none.cache_clear()
    t0 = time.perf_counter()
    vf, pol = vfi(TRAP, GridSpec(1e-3, 5.0, 400), tol=1e-6, table_points=2001)
    return time.perf_counter() - t0, float(pol.savings[-1])


CASES = [("G table (2001 knots, growth)", bench_table),
         ("brute force simplex (3 x n=800)", bench_bruteforce),
         ("VFI trap (n=400, tol=1e-6)", bench_vfi)]


def main():
    backends = ["numpy"]
    if _backend._numba is not None:
        backends.insert(0, "numba")
    else:
        print("numba not importable; timing the numpy path only")

    results = {}
    for bk in backends:
        _backend.set_backend(bk)
        if bk == "numba":        # compile outside the timed region
            for _, fn in CASES:
                fn()
        for name, fn in CASES:
            dt, checksum = fn()
            results[(bk, name)] = (dt, checksum)

    width = max(len(name) for name, _ in CASES)
    header = f"{'kernel':<{width}}  " + "".join(f"{bk:>12}" for bk in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, _ in CASES:
        row = f"{name:<{width}}  "
        for bk in backends:
            row += f"{results[(bk, name)][0]:>11.3f}s"
        if len(backends) == 2:
            row += f"{results[('numpy', name)][0] / results[('numba', name)][0]:>9.1f}x"
        print(row)
    if len(backends) == 2:
        for name, _ in CASES:
            a = results[("numba", name)][1]
            b = results[("numpy", name)][1]
            assert abs(a - b) <= 1e-8 * max(1.0, abs(a)), (name, a, b)
        print("checksums agree across backends")


if __name__ == "__main__":
    main()
