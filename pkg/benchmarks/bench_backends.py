"""Compare the compiled kernel backend against the pure-Python reference.

Times the two hot kernels (RESET pulse trains and alternating write cycling)
on identical inputs, checks the outputs agree bit for bit, and reports the
speedup.  Run from the repository root:

    python3 benchmarks/bench_backends.py [--pulses N] [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from membench.backends import available_backends


def _time(func, *args, repeats: int) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pulses", type=int, default=200_000)
    parser.add_argument("--writes", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the reference is available")
        return 1

    rng = np.random.default_rng(0)
    z_reset = rng.standard_normal(args.pulses)
    z_write = rng.standard_normal(2 * args.writes)

    print(f"{'kernel':<24}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, runner in (
        (
            f"reset_pulse_train({args.pulses})",
            lambda b: _time(
                b.reset_pulse_train, 1.0, 2e-4, 0.1, z_reset, repeats=args.repeats
            ),
        ),
        (
            f"write_cycle_train({args.writes})",
            lambda b: _time(
                b.write_cycle_train, 1.0, 0.0, args.writes, 1, 1.97, 0.1, z_write,
                repeats=args.repeats,
            ),
        ),
    ):
        t_py, r_py = runner(backends["python"])
        t_cy, r_cy = runner(backends["cython"])
        if not np.array_equal(np.asarray(r_py, dtype=float), np.asarray(r_cy, dtype=float)):
            print(f"{name}: BACKENDS DISAGREE")
            return 1
        print(f"{name:<24}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
