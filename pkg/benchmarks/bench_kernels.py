"""Compare the compiled and numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--samples 1000000]
"""
import argparse
import time

import numpy as np

from ergotropic_otto import EngineParams, kernels
from ergotropic_otto.model import energy_table, gibbs_state
from ergotropic_otto.trajectory import _cdfs


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--samples", type=int, default=1_000_000)
    args = parser.parse_args()

    params = EngineParams(1.0, 0.75, 0.5, 4.0)
    p = np.ascontiguousarray(gibbs_state(params).probs)
    e = np.ascontiguousarray(energy_table(params).energies)
    cdfs = _cdfs(params)
    uniforms = np.random.default_rng(0).random((args.samples, 3))

    results = {}
    for name, impl in kernels.backends().items():
        impl.min_permutation_cost(p, e)  # warm caches
        t_perm = best_of(lambda: impl.min_permutation_cost(p, e), args.repeat)
        t_mc = best_of(lambda: impl.sample_counts(*cdfs, uniforms), args.repeat)
        results[name] = (t_perm, t_mc)
        print(f"{name:7s} exhaustive 9! search {t_perm * 1e3:9.1f} ms   "
              f"sampling {args.samples:.0e} cycles {t_mc * 1e3:9.1f} ms")
    if "cython" in results:
        (pp, pm), (cp, cm) = results["python"], results["cython"]
        print(f"speedup  search x{pp / cp:.1f}   sampling x{pm / cm:.1f}")
    else:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
