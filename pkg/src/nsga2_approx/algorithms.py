"""Optimizer loops: classic NSGA-II, NSGA-II with current crowding distance, steady-state NSGA-II.

Generation ``0`` is the random initial population.  Each later generation
selects parents, mutates each parent (in parent order) into a child with a
fresh id, forms ``R = P + Q`` and runs survival selection.  Because children
get increasing ids and survivors keep their order, ``R`` is always sorted by
id.  For the steady-state variant one generation is one iteration producing
a single child.

Two interchangeable engines execute this loop: a pure-Python reference built
from the ranking/survival modules and a compiled kernel.  Both consume the
run's PCG64 stream by the same recipes and yield identical traces.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .core import ConfigurationError, IdCounter, Individual, Population, RngHandle, random_population
from .problems import Problem, ProblemKind
from .ranking import assign_crowding, non_dominated_sort
from .survival import select_classic, select_current_cd, select_steady_state
from .variation import MatingScheme, MutationOp, mutate, select_parents


class Variant(str, enum.Enum):
    CLASSIC = "classic"
    CURRENT_CD = "current-cd"
    STEADY_STATE = "steady-state"


@dataclass(frozen=True)
class AlgorithmConfig:
    """One run.

    ``stop_after_t0`` ends the run that many generations after both extremes
    first appear; ``max_generations`` is the hard cap either way.
    """

    variant: Variant
    problem: Problem
    pop_size: int
    mating: MatingScheme = MatingScheme.FAIR
    mutation: MutationOp = MutationOp.ONE_BIT
    max_generations: int = 1000
    seed: int = 0
    stop_after_t0: int | None = None
    record_coverage: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "mating", MatingScheme(self.mating))
        object.__setattr__(self, "mutation", MutationOp(self.mutation))
        if self.pop_size < 1:
            raise ConfigurationError("population size N must be >= 1")
        if self.max_generations < 0:
            raise ConfigurationError("max_generations must be >= 0")
        if self.stop_after_t0 is not None and self.stop_after_t0 < 0:
            raise ConfigurationError("stop_after_t0 must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.variant is Variant.STEADY_STATE and self.mating is MatingScheme.FAIR:
            raise ConfigurationError("steady-state NSGA-II needs random or tournament mating, not fair")

    @property
    def offspring_per_generation(self) -> int:
        return 1 if self.variant is Variant.STEADY_STATE else self.pop_size

    @property
    def guarantees_apply(self) -> bool:
        """Preconditions of the extreme-retention and removal bounds: OneMinMax, N >= 4."""
        return self.problem.kind is ProblemKind.ONE_MIN_MAX and self.pop_size >= 4

    @property
    def checks_removals(self) -> bool:
        return self.guarantees_apply and self.variant is not Variant.CLASSIC

    @property
    def checks_mei(self) -> bool:
        """MEI persistence is asserted for current CD and for steady state with random mating."""
        if not self.checks_removals:
            return False
        return not (self.variant is Variant.STEADY_STATE and self.mating is MatingScheme.TOURNAMENT)

    @property
    def mei_limit(self) -> float:
        """``L = max(2n/(N-3), 1)``."""
        return max(2 * self.problem.n / (self.pop_size - 3), 1.0)

    @property
    def removal_limit(self) -> float:
        """Strict upper bound ``4/(N-3)`` on the crowding distance of a removed individual."""
        return 4 / (self.pop_size - 3)


@dataclass
class RunTrace:
    """Per-generation record of one run plus post-run invariant checks.

    Index ``g`` of ``mei``/``extremes``/``max_f1``/``min_f1`` is generation
    ``g``; ``evals[g] = N + g * offspring_per_generation``.
    """

    config: AlgorithmConfig
    mei: np.ndarray
    extremes: np.ndarray
    max_f1: np.ndarray
    min_f1: np.ndarray
    final_population: Population
    backend: str
    coverage: list[tuple[int, ...]] | None = None
    removal_checks: int = 0
    removal_violations: int = 0
    max_removal_cdis: float = 0.0
    t0: int | None = None
    t1: int | None = None
    extremes_lost: int = 0
    mei_violations: int = 0
    frontier_regressions: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def generations(self) -> int:
        return len(self.mei) - 1

    @property
    def evals(self) -> np.ndarray:
        g = np.arange(len(self.mei), dtype=np.int64)
        return self.config.pop_size + g * self.config.offspring_per_generation

    @property
    def theorem_violations(self) -> int:
        return self.extremes_lost + self.mei_violations + self.removal_violations + self.frontier_regressions

    def records(self):
        """Rows ``(generation, evals, extremes, mei, coverage)``; coverage is None unless recorded."""
        evals = self.evals
        for g in range(len(self.mei)):
            cov = self.coverage[g] if self.coverage is not None else None
            yield g, int(evals[g]), bool(self.extremes[g]), int(self.mei[g]), cov

    def fingerprint(self) -> tuple:
        """Everything a replay must reproduce, as plain Python values."""
        pop = self.final_population
        return (
            self.mei.tolist(), self.extremes.tolist(), self.t0,
            self.removal_checks, self.removal_violations, self.max_removal_cdis,
            [(ind.id, tuple(ind.objectives), ind.rank, ind.cdis, ind.genome.tobytes()) for ind in pop],
        )


def detect_extremes(P, problem: Problem) -> bool:
    """OneMinMax: some member has ``f1 = 0`` and some has ``f1 = n``.

    LOTZ: some member has ``f1 = n`` and some has ``f2 = n``.
    """
    objs = [ind.objectives if ind.objectives is not None else problem.evaluate(ind.genome) for ind in P]
    n = problem.n
    if problem.kind is ProblemKind.ONE_MIN_MAX:
        f1 = {o[0] for o in objs}
        return 0 in f1 and n in f1
    return any(o[0] == n for o in objs) and any(o[1] == n for o in objs)


def _mei(values) -> int:
    v = sorted(set(values))
    return max((b - a for a, b in zip(v, v[1:])), default=0)


class _Recorder:
    def __init__(self, cfg: AlgorithmConfig):
        self.cfg = cfg
        self.mei: list[int] = []
        self.extremes: list[bool] = []
        self.max_f1: list[int] = []
        self.min_f1: list[int] = []
        self.coverage = [] if cfg.record_coverage else None
        self.removal_checks = 0
        self.removal_violations = 0
        self.max_removal_cdis = 0.0
        self.t0: int | None = None

    def record(self, g: int, P: Population) -> None:
        f1 = P.f1_values()
        ext = detect_extremes(P, self.cfg.problem)
        if ext and self.t0 is None:
            self.t0 = g
        self.mei.append(_mei(f1))
        self.extremes.append(ext)
        self.max_f1.append(max(f1))
        self.min_f1.append(min(f1))
        if self.coverage is not None:
            self.coverage.append(tuple(sorted(set(f1))))

    def check_removals(self, removed_cdis) -> None:
        if not (self.cfg.checks_removals and self.extremes[-1]):
            return
        limit = self.cfg.removal_limit
        for d in removed_cdis:
            self.removal_checks += 1
            self.max_removal_cdis = max(self.max_removal_cdis, d)
            if not d < limit:
                self.removal_violations += 1

    def done(self, g: int) -> bool:
        stop = self.cfg.stop_after_t0
        return g >= self.cfg.max_generations or (stop is not None and self.t0 is not None and g >= self.t0 + stop)


def _run_python(cfg: AlgorithmConfig) -> dict:
    problem, N = cfg.problem, cfg.pop_size
    rng = RngHandle(cfg.seed)
    P = random_population(problem.n, N, rng)
    for ind in P:
        ind.objectives = problem.evaluate(ind.genome)
    assign_crowding(non_dominated_sort(P.members))
    new_id = IdCounter(N)
    rec = _Recorder(cfg)
    rec.record(0, P)
    count = cfg.offspring_per_generation
    g = 0
    while not rec.done(g):
        g += 1
        parents = select_parents(P, cfg.mating, count, rng)
        children = []
        for p in parents:
            child = Individual(new_id(), mutate(p.genome, cfg.mutation, rng))
            child.objectives = problem.evaluate(child.genome)
            children.append(child)
        R = P.members + children
        partition = non_dominated_sort(R)
        if cfg.variant is Variant.CURRENT_CD:
            P, trace = select_current_cd(R, N, partition, rng)
        elif cfg.variant is Variant.STEADY_STATE:
            P, trace = select_steady_state(R, partition, rng, N=N)
        else:
            P, trace = select_classic(R, N, partition, rng)
        rec.check_removals(trace.critical_cdis())
        rec.record(g, P)
    return dict(
        mei=np.array(rec.mei, dtype=np.int32), extremes=np.array(rec.extremes, dtype=bool),
        max_f1=np.array(rec.max_f1, dtype=np.int32), min_f1=np.array(rec.min_f1, dtype=np.int32),
        final_population=P, coverage=rec.coverage, removal_checks=rec.removal_checks,
        removal_violations=rec.removal_violations, max_removal_cdis=rec.max_removal_cdis, extra={},
    )


_ENUM_CODES = {
    "problem": {ProblemKind.ONE_MIN_MAX: 0, ProblemKind.LOTZ: 1},
    "variant": {Variant.CLASSIC: 0, Variant.CURRENT_CD: 1, Variant.STEADY_STATE: 2},
    "mating": {MatingScheme.FAIR: 0, MatingScheme.RANDOM: 1, MatingScheme.TOURNAMENT: 2},
    "mutation": {MutationOp.ONE_BIT: 0, MutationOp.BIT_WISE: 1},
}


def _run_compiled(cfg: AlgorithmConfig) -> dict:
    kernel = _backend.kernel()
    rng = RngHandle(cfg.seed)
    bg = rng.bit_generator
    with bg.lock:
        out = kernel.run_loop(
            bg, cfg.problem.n, _ENUM_CODES["problem"][cfg.problem.kind], cfg.pop_size,
            _ENUM_CODES["variant"][cfg.variant], _ENUM_CODES["mating"][cfg.mating],
            _ENUM_CODES["mutation"][cfg.mutation], cfg.max_generations,
            -1 if cfg.stop_after_t0 is None else cfg.stop_after_t0,
            cfg.record_coverage, cfg.checks_removals, cfg.removal_limit if cfg.pop_size > 3 else 0.0,
        )
    n, N = cfg.problem.n, cfg.pop_size
    bits = np.unpackbits(out.pop("final_words").view(np.uint8), bitorder="little").reshape(N, -1)[:, :n]
    members = []
    for i in range(N):
        genome = bits[i].copy()
        genome.setflags(write=False)
        ind = Individual(int(out["final_ids"][i]), genome)
        ind.objectives = cfg.problem.evaluate(genome)
        ind.rank = int(out["final_rank"][i])
        ind.cdis = float(out["final_cdis"][i])
        members.append(ind)
    for key in ("final_ids", "final_rank", "final_cdis"):
        out.pop(key)
    out["final_population"] = Population(members, N)
    out["extremes"] = out["extremes"].astype(bool)
    out["extra"] = {"queue_ops": out.pop("queue_ops")}
    return out


def _analyse(trace: RunTrace) -> RunTrace:
    """Fill ``t0``, ``t1`` and the per-generation invariant counters from the arrays."""
    cfg = trace.config
    ext = trace.extremes
    hits = np.flatnonzero(ext)
    trace.t0 = int(hits[0]) if hits.size else None
    if trace.t0 is None:
        return trace
    t0 = trace.t0
    mei = trace.mei.astype(np.int64)
    L = cfg.mei_limit if cfg.pop_size > 3 else float("inf")
    below = np.flatnonzero(mei[t0:] <= L)
    trace.t1 = t0 + int(below[0]) if below.size else None
    if cfg.guarantees_apply:
        trace.extremes_lost = int(np.count_nonzero(~ext[t0:]))
        post_max, post_min = trace.max_f1[t0:], trace.min_f1[t0:]
        trace.frontier_regressions = int(np.count_nonzero(np.diff(post_max) < 0) + np.count_nonzero(np.diff(post_min) > 0))
    if cfg.checks_mei:
        prev, nxt = mei[t0:-1], mei[t0 + 1:]
        trace.mei_violations = int(np.count_nonzero(nxt > np.maximum(prev, L)))
    return trace


def run(config: AlgorithmConfig, backend: str = "auto") -> RunTrace:
    """Execute one run; ``backend`` is ``"auto"``, ``"python"`` or ``"compiled"``."""
    name = _backend.resolve(backend)
    out = _run_compiled(config) if name == "compiled" else _run_python(config)
    trace = RunTrace(config=config, backend=name, **out)
    return _analyse(trace)


__all__ = ["AlgorithmConfig", "RunTrace", "Variant", "detect_extremes", "run"]
