"""Compare the compiled sampling kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per (kernel, law, backend) with the best wall time and the
throughput in draws per second.
"""
import argparse
import time

import numpy as np

from hardybound import kernels
from hardybound.distributions import Exponential, Pareto, random_discrete
from hardybound.worst_case import build_slot_system


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--draws", type=int, default=1_000_000)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args(argv)

    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    laws = {
        "exponential": Exponential(),
        "pareto": Pareto(2, 1),
        "discrete20": random_discrete(np.random.default_rng(0), atoms=20),
    }
    u = np.random.default_rng(1).random(args.draws)
    print(f"{'kernel':<14}{'law':<13}{'backend':<10}{'seconds':>10}{'draws/s':>14}")
    for name, mu in laws.items():
        spec = mu.kernel_spec()
        for b in backends:
            t = best_of(lambda: kernels.quantile_many(spec, u, backend=b), args.repeat)
            print(f"{'quantile_many':<14}{name:<13}{b:<10}{t:>10.4f}{args.draws / t:>14.3e}")
        fam0, fam1 = build_slot_system(mu, 0.5, args.n).families()
        draws = args.n * args.reps
        for b in backends:
            t = best_of(
                lambda: kernels.slot_averages(kernels.block_rng(0, 0, 0), spec, fam0, fam1, 0.5, 2, args.reps, backend=b),
                args.repeat,
            )
            print(f"{'slot_averages':<14}{name:<13}{b:<10}{t:>10.4f}{draws / t:>14.3e}")
    if len(backends) == 1:
        print("compiled extension not available; only the fallback was timed")


if __name__ == "__main__":
    main()
