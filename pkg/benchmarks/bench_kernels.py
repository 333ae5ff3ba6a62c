"""Time the numba and numpy kernel backends on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from qpseudo import kernels

COUNT_MODULI = [561, 2047, 8911, 29341, 99991 * 3]
PREDICATES = [("fermat", 0), ("strong", 0), ("midy_order_equality", 0)]


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def workloads():
    ns = np.arange(3, 2_000_001, 2, dtype=np.int64)
    yield "census_mask fermat, 10^6 odd n", lambda: kernels.census_mask(ns, 2, strong=False).sum()
    yield "census_mask strong, 10^6 odd n", lambda: kernels.census_mask(ns, 2, strong=True).sum()
    for pred, q in PREDICATES:
        yield f"count_bases {pred}", lambda pred=pred, q=q: [kernels.count_bases(n, pred, q) for n in COUNT_MODULI]
    yield "count_bases q_probable q=5", lambda: kernels.count_bases(8911, "q_probable", 5)
    rng = np.random.default_rng(0)
    b = rng.integers(2, kernels.MAX_MODULUS, 10**6)
    e = rng.integers(1, 2**62, 10**6)
    m = rng.integers(3, kernels.MAX_MODULUS, 10**6)
    yield "powmod, 10^6 triples", lambda: int(kernels.powmod(b, e, m).sum())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    print(f"{'workload':40s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, fn in workloads():
        row, results = [], []
        for name in backends:
            with kernels.use_backend(name):
                if name == "numba":
                    fn()  # compile
                seconds, result = best_of(args.repeat, fn)
            row.append(seconds)
            results.append(result)
        if len(results) == 2 and results[0] != results[1]:
            raise SystemExit(f"backends disagree on {label}: {results}")
        speedup = f"{row[0] / row[1]:9.1f}x" if len(row) == 2 else ""
        print(f"{label:40s}" + "".join(f"{t:11.3f}s" for t in row) + f"  {speedup}")


if __name__ == "__main__":
    main()
