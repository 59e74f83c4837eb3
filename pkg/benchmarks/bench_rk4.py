"""Compare the compiled and pure-Python RK4 kernels.

Usage: python3 benchmarks/bench_rk4.py [--steps N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from solitonforge import ode_reduction as od
from solitonforge.ode_reduction import OdeParams, OdeState, integrate_m1, integrate_reduced

CASES = {
    "reduced-expanding": lambda n, b: integrate_reduced(
        OdeState(0.0, 2.0, 0.0, 0.0), OdeParams(2, -2.0, -4.0), 1.0, 1.0 / n, backend=b),
    "m1-derived": lambda n, b: integrate_m1(
        OdeState(0.0, 1.0, 0.2, 0.5), OdeParams(1, -1.0, 0.0, k=0.5), 1.0, 1.0 / n, backend=b),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = ["python"] + (["cython"] if od._compiled is not None else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing the Python kernel only")
    print(f"{'case':<20} {'backend':<8} {'best [s]':>10} {'steps/s':>12}")
    for name, run in CASES.items():
        results = {}
        for b in backends:
            best = min(timeit.repeat(lambda: run(args.steps, b), number=1, repeat=args.repeat))
            results[b] = (best, run(args.steps, b))
            print(f"{name:<20} {b:<8} {best:>10.4f} {args.steps / best:>12.3g}")
        if len(results) == 2:
            (tp, a), (tc, c) = results["python"], results["cython"]
            same = all(np.array_equal(getattr(a, k), getattr(c, k)) for k in ("f", "fp", "h1p"))
            print(f"{'':<20} speedup {tp / tc:.1f}x, bitwise identical: {same}")


if __name__ == "__main__":
    main()
