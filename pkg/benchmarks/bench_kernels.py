"""Benchmark the compiled kernel lane against the numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [n_balls]

Times the three per-ball hot kernels (cell binning, grouped accumulation,
residual lookup) and the combined build-and-score pass on synthetic data.
The two lanes are also cross-checked for bitwise agreement.
"""

import sys
import time

import numpy as np

from tbr import kernels

GRID = dict(ev_min=0.0, ev_width=3.0, n_ev=40, la_min=-90.0, la_width=3.0,
            n_la=60)
N_CELLS = GRID["n_ev"] * GRID["n_la"]


def bin_args():
    return (GRID["ev_min"], GRID["ev_width"], GRID["n_ev"],
            GRID["la_min"], GRID["la_width"], GRID["n_la"])


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    rng = np.random.default_rng(0)
    ev = rng.uniform(0.0, 120.0, n)
    la = rng.uniform(-90.0, 90.0, n)
    tb = rng.integers(0, 5, n).astype(np.float64)

    lanes = {"py": kernels.get_backend("py")}
    try:
        lanes["c"] = kernels.get_backend("c")
    except ImportError:
        print("compiled lane unavailable; showing numpy lane only")

    idx = lanes["py"].flat_bin_index(ev, la, *bin_args())
    sums, counts = lanes["py"].accumulate(idx, tb, N_CELLS)
    mu = np.full(N_CELLS, np.nan)
    mu[counts > 0] = sums[counts > 0] / counts[counts > 0]

    cases = {
        "flat_bin_index": lambda impl: impl.flat_bin_index(ev, la, *bin_args()),
        "accumulate": lambda impl: impl.accumulate(idx, tb, N_CELLS),
        "subtract_lookup": lambda impl: impl.subtract_lookup(idx, tb, mu),
        "build+score": lambda impl: impl.subtract_lookup(
            impl.flat_bin_index(ev, la, *bin_args()), tb, mu),
    }

    print(f"{n:,} balls, {N_CELLS} grid cells "
          f"(active backend: {kernels.backend_name()})\n")
    header = f"{'kernel':<18}" + "".join(f"{name + ' (ms)':>12}"
                                         for name in lanes)
    if len(lanes) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for case, runner in cases.items():
        times = {name: best_of(lambda impl=impl: runner(impl)) * 1e3
                 for name, impl in lanes.items()}
        row = f"{case:<18}" + "".join(f"{times[name]:>12.1f}"
                                      for name in lanes)
        if len(lanes) == 2:
            row += f"{times['py'] / times['c']:>9.1f}x"
        print(row)

    if len(lanes) == 2:
        a = lanes["py"].flat_bin_index(ev, la, *bin_args())
        b = lanes["c"].flat_bin_index(ev, la, *bin_args())
        sa, ca = lanes["py"].accumulate(a, tb, N_CELLS)
        sb, cb = lanes["c"].accumulate(b, tb, N_CELLS)
        ra = lanes["py"].subtract_lookup(a, tb, mu)
        rb = lanes["c"].subtract_lookup(b, tb, mu)
        agree = ((a == b).all() and (sa == sb).all() and (ca == cb).all()
                 and np.array_equal(ra, rb, equal_nan=True))
        print(f"\nlanes agree bitwise: {agree}")


if __name__ == "__main__":
    main()
