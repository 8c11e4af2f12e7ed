#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-NumPy time-stepping kernels.

Runs the two hot loops (delayed fixed-step integrator, delayed linear
recursion) on directed-ring workloads of increasing size and reports the
best-of-``--repeat`` wall time for each backend plus the speedup factor.
Outputs agree to floating-point noise before anything is timed.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 6,24,48]
        [--ct-steps 4000] [--dt-steps 50000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dacdelay._kernels import BACKEND, _reference
from dacdelay.graph import laplacian, ring_graph

try:
    from dacdelay._kernels import _speedups
except ImportError:  # pragma: no cover - extension not built
    _speedups = None


def _best_time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _ct_workload(n, k_steps, rng):
    # stable for every ring size: delay 10 steps of 0.02 is far below the
    # admissible bound at coupling 0.2
    a = -0.2 * laplacian(ring_graph(n))
    f_half = rng.normal(size=(2 * k_steps + 1, n))
    y0 = np.zeros((n, 1))
    return a, f_half, 10, 0.02, k_steps, y0


def _dt_workload(n, k_steps, rng):
    # coupling 0.1 tolerates delay 3 on every ring
    m_mat = 0.1 * laplacian(ring_graph(n))
    r = rng.normal(size=(k_steps + 1, n))
    return m_mat, r, 3, k_steps


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best wins)")
    parser.add_argument("--sizes", default="6,24,48", help="comma-separated ring sizes")
    parser.add_argument("--ct-steps", type=int, default=4000, help="integrator steps")
    parser.add_argument("--dt-steps", type=int, default=50000, help="recursion steps")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"selected backend at import: {BACKEND}")
    if _speedups is None:
        print("compiled extension unavailable; timing the reference kernels only\n")

    # sanity: both backends must agree before timing means anything
    if _speedups is not None:
        a, f_half, m, h, k, y0 = _ct_workload(6, 200, rng)
        assert np.allclose(
            _speedups.ct_delay_rk4(a, f_half, m, h, k, y0),
            _reference.ct_delay_rk4(a, f_half, m, h, k, y0),
            rtol=1e-10, atol=1e-12,
        )
        m_mat, r, d, k = _dt_workload(6, 500, rng)
        assert np.allclose(
            _speedups.dt_delay_iterate(m_mat, r, d, k),
            _reference.dt_delay_iterate(m_mat, r, d, k),
            rtol=1e-10, atol=1e-12,
        )

    header = f"{'kernel':<16}{'n':>4}{'steps':>8}{'reference':>12}{'compiled':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, build, steps in (
            ("ct_delay_rk4", _ct_workload, args.ct_steps),
            ("dt_delay_iterate", _dt_workload, args.dt_steps),
        ):
            work = build(n, steps, rng)
            ref = _best_time(getattr(_reference, name), work, args.repeat)
            if _speedups is None:
                print(f"{name:<16}{n:>4}{steps:>8}{ref * 1e3:>9.2f} ms{'-':>12}{'-':>9}")
            else:
                fast = _best_time(getattr(_speedups, name), work, args.repeat)
                print(
                    f"{name:<16}{n:>4}{steps:>8}{ref * 1e3:>9.2f} ms"
                    f"{fast * 1e3:>9.2f} ms{ref / fast:>8.1f}x"
                )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
