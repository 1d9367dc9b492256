"""Time the compiled and pure-numpy integrator kernels side by side.

Runs the bundled example instances on both backends with identical
configs and reports wall time per run plus the speedup ratio. The
compiled backend gets one untimed warmup call so JIT compilation is
not billed to the measurement.

Usage:
    python benchmarks/bench_backends.py [--seeds 3] [--repeats 3]
"""

import argparse
import time

import numpy as np

import penflow as pf
from penflow.harness import build, generate_example1, generate_example2

GENERATORS = {1: generate_example1, 2: generate_example2}


def time_backend(problem, x0, icfg, backend, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        rec = pf.run(problem, x0, icfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, rec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=2, help="seeds per example")
    ap.add_argument("--repeats", type=int, default=1,
                    help="timed repeats, best of")
    args = ap.parse_args()

    try:
        import numba  # noqa: F401
        backends = ("numpy", "numba")
    except ImportError:
        print("numba not installed; timing the numpy backend only")
        backends = ("numpy",)

    if "numba" in backends:
        problem, x0, icfg = build(generate_example1(0))
        pf.run(problem, x0, icfg, backend="numba")  # warmup, compiles

    header = f"{'instance':<14}{'steps':>8}" + "".join(
        f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    totals = {b: 0.0 for b in backends}
    for example, gen in sorted(GENERATORS.items()):
        for seed in range(args.seeds):
            problem, x0, icfg = build(gen(seed))
            row = {}
            steps = None
            for b in backends:
                row[b], rec = time_backend(problem, x0, icfg, b, args.repeats)
                totals[b] += row[b]
                n_steps = int(rec.steps[-1])
                if steps is None:
                    steps = n_steps
                elif n_steps != steps:
                    raise RuntimeError(
                        f"backends disagree on step count: {n_steps} vs {steps}")
            line = f"ex{example} seed {seed:<4}{steps:>8}" + "".join(
                f"{row[b] * 1e3:>10.1f}ms" for b in backends)
            if len(backends) == 2:
                line += f"{row['numpy'] / row['numba']:>9.1f}x"
            print(line)

    line = f"{'total':<14}{'':>8}" + "".join(
        f"{totals[b] * 1e3:>10.1f}ms" for b in backends)
    if len(backends) == 2:
        line += f"{totals['numpy'] / totals['numba']:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
