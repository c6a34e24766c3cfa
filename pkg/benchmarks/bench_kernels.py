"""Compare the compiled and pure kernel backends.

Times the two hot paths -- the game-Riccati fixed-point iteration and the
closed-loop trial simulator -- on the bundled benchmark model.

Usage:
    python benchmarks/bench_kernels.py [--trials N] [--horizon T] [--repeat R]
"""

import argparse
import time
from importlib import resources

import numpy as np

from schedopt import Schedule, SystemModel, solve_dare
from schedopt._kernels import HAVE_COMPILED, get_backend


def load_model() -> SystemModel:
    ref = resources.files("schedopt.data") / "paper5.json"
    with resources.as_file(ref) as path:
        return SystemModel.from_json(path)


def best_of(repeat, fn, *args):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def bench_pgamma(backend, model, repeat):
    gammas = [4.0, 8.0, 15.0, 25.0, 40.0, 55.0]

    def run():
        for g in gammas:
            backend.pgamma_fixed_point(model.A, model.B, model.Q, model.R,
                                       g, 1e-10, 100_000)

    return best_of(repeat, run)


def bench_simulate(backend, model, ric, trials, horizon, repeat):
    sigma = np.array(Schedule([2, 4]).to_sigma(), dtype=np.int8)
    rng = np.random.default_rng(0)
    noise = rng.standard_normal((trials, horizon, model.n))
    return best_of(repeat, backend.simulate_trials, model.A, model.B, ric.K,
                   model.Q, model.R, sigma, noise)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--horizon", type=int, default=60_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    model = load_model()
    ric = solve_dare(model)
    backends = ["pure"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("note: compiled extension not built; timing the pure backend only")

    results = {}
    for name in backends:
        backend = get_backend(name)
        t_pg = bench_pgamma(backend, model, args.repeat)
        t_sim = bench_simulate(backend, model, ric, args.trials,
                               args.horizon, args.repeat)
        results[name] = (t_pg, t_sim)
        print(f"{name:>9}  pgamma fixed point: {t_pg * 1e3:8.1f} ms   "
              f"simulate ({args.trials}x{args.horizon}): {t_sim * 1e3:8.1f} ms")

    if len(results) == 2:
        pg_speedup = results["pure"][0] / results["compiled"][0]
        sim_speedup = results["pure"][1] / results["compiled"][1]
        print(f"  speedup  pgamma: {pg_speedup:5.1f}x   simulate: {sim_speedup:5.1f}x")


if __name__ == "__main__":
    main()
