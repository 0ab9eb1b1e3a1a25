"""Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

Run standalone with ``python3 tests/test_acceptance.py`` or as part of pytest;
the verdict lines are repeated in the pytest terminal summary.
"""
from __future__ import annotations

import functools
import itertools
import math
import sys
import time

import numpy as np
import pytest

from nsga2_approx.algorithms import AlgorithmConfig, Variant, run
from helpers import omm
from nsga2_approx.core import RngHandle, random_population
from nsga2_approx.harness.config import ExperimentConfig
from nsga2_approx.harness.experiment import run_experiment, run_seed
from nsga2_approx.metrics import (
    FrontSubset, eps_exact, eps_lower, eps_upper, hv_bounds, hv_exact, hv_opt_bounds, hv_union_oracle, mei,
    mei_of_values, mei_opt,
)
from nsga2_approx.problems import Problem, eval_lotz
from nsga2_approx.ranking import non_dominated_sort, peel_fronts
from nsga2_approx.scenarios import Scenario, alternating_keep, build_adversarial, run_selection_trials
from nsga2_approx.survival import naive_current_cd_oracle, select_current_cd

pytestmark = pytest.mark.acceptance

VERDICTS: list[str] = []

# ---- pinned tolerances and sizes
TABLE1_TOL = {"classic": 3, "current-cd": 1, "steady-state": 1}
TABLE1 = {  # (variant, N) -> (early window, late window)
    ("classic", 301): ((7, 8, 9), (7, 8, 9)),
    ("current-cd", 301): ((3, 3, 3), (3, 3, 3)),
    ("steady-state", 301): ((3, 3, 3), (3, 3, 3)),
    ("classic", 151): ((14, 15, 17), (14, 15, 17)),
    ("current-cd", 151): ((5, 5, 6), (5, 5, 6)),
    ("steady-state", 151): ((5, 5, 5), (5, 5, 5)),
    ("classic", 76): ((23, 26, 29), (24, 27, 30)),
    ("current-cd", 76): ((11, 12, 12), (11, 12, 12)),
    ("steady-state", 76): ((11, 12, 12), (11, 11, 11)),
}
INVARIANT_NS, INVARIANT_POPS, INVARIANT_SEEDS, INVARIANT_GENS = (50, 200, 601), (8, 26, 76), 20, 3100
ADVERSARIAL_NS, ADVERSARIAL_TRIALS = (6, 30, 300), 100
COVERAGE_N, COVERAGE_TRIALS, COVERAGE_FRACTION = 601, 1000, 0.95
HV_TOL = 1e-9
SANDWICH_NS, SANDWICH_SUBSETS = (10, 100, 601), 1000
GROWTH_NS, GROWTH_SEEDS, GROWTH_SLACK, SAFETY_CAP = (50, 100, 200), 20, 3.0, 10**6
MASTER_SEED = 20230601


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line, flush=True)
    assert ok, line


# ---- shared run sets (criterion 4 audits all of them)

@functools.cache
def table1_result():
    return run_experiment(ExperimentConfig(seed=MASTER_SEED))


@functools.cache
def invariant_traces():
    traces = []
    for n, N, variant in itertools.product(INVARIANT_NS, INVARIANT_POPS, (Variant.CURRENT_CD, Variant.STEADY_STATE)):
        scale = N if variant is Variant.STEADY_STATE else 1
        mating = "random" if variant is Variant.STEADY_STATE else "fair"
        for s in range(INVARIANT_SEEDS):
            cfg = AlgorithmConfig(variant, Problem.one_min_max(n), N, mating=mating, seed=run_seed(MASTER_SEED + 3, variant, N, s),
                                  max_generations=SAFETY_CAP * scale + INVARIANT_GENS * scale,
                                  stop_after_t0=INVARIANT_GENS * scale)
            traces.append(run(cfg))
    return traces


@functools.cache
def growth_traces():
    out = {}
    for n in GROWTH_NS:
        out[n] = [run(AlgorithmConfig(Variant.CURRENT_CD, Problem.one_min_max(n), n // 4, seed=derive(n, s),
                                      max_generations=SAFETY_CAP, stop_after_t0=0))
                  for s in range(GROWTH_SEEDS)]
    return out


def derive(n, s):
    return run_seed(MASTER_SEED + 10, Variant.CURRENT_CD, n, s)


def random_extreme_subset(n, rng):
    """Inner points kept independently with a per-subset density, so the corpus spans sparse to dense."""
    while True:
        p = rng.random()
        inner = [k for k in range(1, n) if rng.random() < p]
        s = FrontSubset.of(n, [0, n, *inner])
        if mei(s) < n:
            return s


# ---- criteria

@pytest.mark.slow
def test_criterion_01_table1():
    start = time.perf_counter()
    result = table1_result()
    misses = []
    for (variant, N), refs in TABLE1.items():
        for window, ref in zip(("1-100", "3001-3100"), refs):
            got = result.summary(variant, N, window).triple()
            if any(abs(a - b) > TABLE1_TOL[variant] for a, b in zip(got, ref)):
                misses.append(f"{variant}/{N}/{window}: {got} vs {ref}")
    cells = ", ".join(f"{s.variant}/{s.N}/{s.window}={s.triple()}" for s in result.summaries)
    ok = not misses and not result.failed_runs and not result.violating_runs
    verdict(1, ok, f"{len(result.summaries)} cells, failed runs {len(result.failed_runs)}, "
                   f"misses {misses or 'none'} [{cells}] ({time.perf_counter() - start:.0f}s)")


def test_criterion_02_mei_opt():
    paper = [mei_opt(601, N) for N in (301, 151, 76)]
    mismatches = 0
    for n in range(1, 13):
        for N in range(2, 7):
            best = min(mei(FrontSubset(n, (0, *c, n))) for k in range(0, N - 1)
                       for c in itertools.combinations(range(1, n), k))
            mismatches += best != mei_opt(n, N)
    verdict(2, paper == [3, 5, 9] and mismatches == 0, f"mei_opt(601, 301/151/76) = {paper}; enumeration mismatches {mismatches}")


@pytest.mark.slow
def test_criterion_03_mei_invariant():
    violations = unreached = 0
    for t in invariant_traces():
        L = t.config.mei_limit
        if t.t0 is None or t.t1 is None:
            unreached += 1
            continue
        violations += int(np.count_nonzero(t.mei[t.t1:] > L)) + t.mei_violations + t.extremes_lost
    total = len(invariant_traces())
    verdict(3, violations == 0 and unreached == 0,
            f"{total} runs, generations above L after t1: {violations}, runs without t0/t1: {unreached}")


@pytest.mark.slow
def test_criterion_04_removal_bound():
    checked = violations = 0
    worst = 0.0
    runs = list(invariant_traces()) + [t for ts in growth_traces().values() for t in ts]
    for t in runs:
        checked += t.removal_checks
        violations += t.removal_violations
        worst = max(worst, t.max_removal_cdis / t.config.removal_limit)
    table = table1_result()
    for rec in table.records:
        if rec.variant != "classic":
            violations += rec.violations["removal"]
            worst = max(worst, rec.max_removal_cdis / (4 / (rec.N - 3)))
    verdict(4, violations == 0 and checked > 0,
            f"{checked} audited removals outside Table 1 plus all Table 1 runs, violations {violations}, "
            f"max cdis / bound {worst:.3f}")


def test_criterion_05_adversarial():
    bad = []
    for n in ADVERSARIAL_NS:
        stats = run_selection_trials(Scenario("adversarial", n), "classic", ADVERSARIAL_TRIALS, RngHandle(n))
        if set(stats.samples) != {n // 3 + 2}:
            bad.append((n, sorted(set(stats.samples))))
    keep = {n: mei_of_values(i.f1 for i in alternating_keep(build_adversarial(n))) for n in ADVERSARIAL_NS}
    verdict(5, not bad and all(v <= 4 for v in keep.values()),
            f"classic MEI n/3+2 in all {ADVERSARIAL_TRIALS} trials for n={ADVERSARIAL_NS}: {not bad} {bad}; "
            f"alternating-keep MEI {keep}")


def test_criterion_06_full_coverage():
    stats = run_selection_trials(Scenario("full-coverage", COVERAGE_N), "classic", COVERAGE_TRIALS, RngHandle(601))
    cap = 3 * math.log(COVERAGE_N) / math.log(1.5)
    frac = stats.fraction_at_least(2)
    verdict(6, frac >= COVERAGE_FRACTION and max(stats.samples) <= cap,
            f"fraction MEI>=2 {frac:.3f} (need {COVERAGE_FRACTION}), max {max(stats.samples)} (cap {cap:.1f}), "
            f"quartiles {stats.quartiles.triple()}")


def test_criterion_07_oracles():
    rng = RngHandle(7)
    a_bad = 0
    for case in range(200):
        n = 2 + rng.below(19)
        values = [rng.below(n + 1) for _ in range(2 + rng.below(2 * n))]
        N = 1 + rng.below(len(values))
        R1, R2 = omm(values, n=n), omm(values, n=n)
        keys = {i.id: rng.random() for i in R1}
        P1, _ = select_current_cd(R1, N, non_dominated_sort(R1), tie_keys=keys)
        P2, _ = naive_current_cd_oracle(R2, N, non_dominated_sort(R2), tie_keys=keys)
        a_bad += set(P1.ids()) != set(P2.ids())
    b_bad = 0
    worst = 0.0
    for n in range(1, 31):
        for _ in range(100):
            s = FrontSubset.of(n, [0, n, *(k for k in range(1, n) if rng.coin())])
            d = abs(hv_exact(s) - hv_union_oracle(s))
            worst = max(worst, d)
            b_bad += d > HV_TOL
    c_bad = 0
    for _ in range(500):
        n, m = 1 + rng.below(10), 1 + rng.below(32)
        R = list(random_population(n, m, rng))
        for ind in R:
            ind.objectives = eval_lotz(ind.genome)
        c_bad += non_dominated_sort(R).id_sets() != peel_fronts(R)
    verdict(7, a_bad == b_bad == c_bad == 0,
            f"(a) current-cd vs naive mismatches {a_bad}/200; (b) hv mismatches {b_bad}/3000, max diff {worst:.1e}; "
            f"(c) sort vs peel mismatches {c_bad}/500")


@functools.cache
def subset_corpus():
    rng = RngHandle(8)
    return [random_extreme_subset(n, rng) for n in SANDWICH_NS for _ in range(SANDWICH_SUBSETS)]


def test_criterion_08_eps_sandwich():
    bad = 0
    for s in subset_corpus():
        lo, ex, hi = eps_lower(s), eps_exact(s), eps_upper(s)
        bad += not (lo - HV_TOL <= ex <= hi + HV_TOL)
    verdict(8, bad == 0, f"{len(subset_corpus())} subsets at n={SANDWICH_NS}, sandwich violations {bad}")


def test_criterion_09_hv_bounds():
    bad = sum(not (lo - HV_TOL <= hv_exact(s) <= hi + HV_TOL)
              for s in subset_corpus() for lo, hi in [hv_bounds(s)])
    opt_bad = []
    for n in range(1, 13):
        for N in range(2, 6):
            best = max(hv_union_oracle(FrontSubset(n, (0, *c, n))) for k in range(0, N - 1)
                       for c in itertools.combinations(range(1, n), k))
            lo, hi = hv_opt_bounds(n, N)
            if not lo - HV_TOL <= best <= hi + HV_TOL:
                opt_bad.append((n, N, best, lo, hi))
    verdict(9, bad == 0 and not opt_bad,
            f"hv outside hv_bounds: {bad}/{len(subset_corpus())}; hv_opt outside hv_opt_bounds: {opt_bad or 'none'}")


@pytest.mark.slow
def test_criterion_10_t0_growth():
    traces = growth_traces()
    found = all(t.t0 is not None for ts in traces.values() for t in ts)
    means = {n: float(np.mean([t.t0 for t in ts if t.t0 is not None])) for n, ts in traces.items()}
    C = means[GROWTH_NS[0]] / (GROWTH_NS[0] * math.log(GROWTH_NS[0]))
    ratios = {n: means[n] / (C * n * math.log(n)) for n in GROWTH_NS}
    verdict(10, found and all(r <= GROWTH_SLACK for r in ratios.values()),
            f"all runs found extremes: {found}; mean t0 {({n: round(v, 1) for n, v in means.items()})}, "
            f"C={C:.3f}, ratio to C n ln n {({n: round(r, 2) for n, r in ratios.items()})} (slack {GROWTH_SLACK})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
