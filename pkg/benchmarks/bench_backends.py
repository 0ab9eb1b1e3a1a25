"""Compiled kernel vs pure-Python engine.

Two measurements per size:

* ``select``: thinning one OneMinMax front of ``2N`` individuals down to ``N``
  (classic and current crowding distance);
* ``run``: complete optimizer runs of a fixed number of generations.

Both engines consume the same random stream, so the benchmark also checks
that they agree before reporting a speed-up.

    python3 benchmarks/bench_backends.py [--quick] [--repeat K]
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from nsga2_approx import _backend
from nsga2_approx.algorithms import AlgorithmConfig, run
from nsga2_approx.core import Individual, ObjectiveVector, RngHandle, make_genome
from nsga2_approx.problems import Problem
from nsga2_approx.ranking import non_dominated_sort
from nsga2_approx.survival import select_classic, select_current_cd


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def front(n, size, seed):
    rng = RngHandle(seed)
    f1 = np.array([0, n] + [rng.below(n + 1) for _ in range(size - 2)], dtype=np.int32)
    ties = [rng.random() for _ in range(size)]
    return f1, ties


def bench_select(n, N, current, repeat):
    f1, ties = front(n, 2 * N, N)
    genome = make_genome("0")

    def python():
        R = [Individual(i, genome, ObjectiveVector(int(k), n - int(k))) for i, k in enumerate(f1)]
        select = select_current_cd if current else select_classic
        _, trace = select(R, N, non_dominated_sort(R), tie_keys=dict(enumerate(ties)))
        return trace.removed_ids()

    def compiled():
        removed, _, _ = _backend.kernel().select_front(f1, n - f1, ties, N, current)
        return [int(i) for i in removed]

    tp, a = best_of(python, repeat)
    tc, b = best_of(compiled, repeat)
    if a != b:
        raise SystemExit(f"engines disagree on select n={n} N={N}")
    return tp, tc


def bench_run(variant, n, N, generations, repeat):
    mating = "random" if variant == "steady-state" else "fair"
    cfg = AlgorithmConfig(variant, Problem.one_min_max(n), N, mating=mating, max_generations=generations, seed=1)
    tp, a = best_of(lambda: run(cfg, "python"), repeat)
    tc, b = best_of(lambda: run(cfg, "compiled"), repeat)
    if a.fingerprint() != b.fingerprint():
        raise SystemExit(f"engines disagree on run {variant} n={n} N={N}")
    return tp, tc


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not _backend.compiled_available():
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1

    sizes = [(101, 51), (601, 301)] if args.quick else [(101, 51), (601, 301), (2001, 1001)]
    print(f"{'case':<34}{'python s':>12}{'compiled s':>12}{'speed-up':>10}")
    speedups = []
    for n, N in sizes:
        for current in (False, True):
            tp, tc = bench_select(n, N, current, args.repeat)
            speedups.append(tp / tc)
            label = f"select {'current' if current else 'classic'} n={n} N={N}"
            print(f"{label:<34}{tp:>12.4f}{tc:>12.5f}{tp / tc:>9.0f}x")
    runs = [("classic", 101, 51, 50), ("current-cd", 101, 51, 50), ("steady-state", 101, 51, 2000)]
    if not args.quick:
        runs.append(("current-cd", 601, 76, 50))
    for variant, n, N, gens in runs:
        tp, tc = bench_run(variant, n, N, gens, args.repeat)
        speedups.append(tp / tc)
        label = f"run {variant} n={n} N={N} g={gens}"
        print(f"{label:<34}{tp:>12.4f}{tc:>12.5f}{tp / tc:>9.0f}x")
    print(f"geometric mean speed-up {statistics.geometric_mean(speedups):.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
