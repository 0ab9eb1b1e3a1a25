"""Table-1 style experiments: many seeded runs, pooled window quartiles, CSV/JSON output."""
from __future__ import annotations

import csv
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from ..algorithms import AlgorithmConfig, RunTrace, Variant, run
from ..core import derive_seed
from ..problems import Problem
from .config import ExperimentConfig
from .stats import BlockStats, QuartileSummary, quartiles, steady_state_block_stats

TRACE_COLUMNS = ("run", "seed", "variant", "N", "gen_post_t0", "gen_raw", "mei", "extremes", "evals")
TABLE_COLUMNS = ("variant", "N", "window", "q1", "q2", "q3", "samples")
BLOCK_COLUMNS = ("block", "length", "min", "median", "max", "partial")

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION, EXIT_TIMEOUT = 0, 1, 2, 3


def run_seed(master: int, variant: Variant | str, N: int, run_index: int) -> int:
    """Seed of one run: setting-specific stream of the master seed, substream ``run_index``."""
    setting = zlib.crc32(f"{Variant(variant).value}:{N}".encode())
    return derive_seed(master ^ setting, run_index)


def window_label(window: tuple[int, int]) -> str:
    return f"{window[0]}-{window[1]}"


@dataclass(frozen=True)
class Job:
    variant: Variant
    N: int
    run: int
    seed: int
    algorithm: AlgorithmConfig


@dataclass
class RunRecord:
    """Outcome of one run, reduced to what the experiment reports."""

    variant: str
    N: int
    run: int
    seed: int
    t0: int | None
    t1: int | None
    generations: int
    window_samples: dict[str, list[int]]
    rows: list[tuple]
    violations: dict[str, int]
    max_removal_cdis: float
    blocks: list[BlockStats] | None = None

    @property
    def failed(self) -> bool:
        return self.t0 is None

    @property
    def violated(self) -> bool:
        return any(self.violations.values())


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]
    summaries: list[QuartileSummary] = field(default_factory=list)

    @property
    def failed_runs(self) -> list[RunRecord]:
        return [r for r in self.records if r.failed]

    @property
    def violating_runs(self) -> list[RunRecord]:
        return [r for r in self.records if r.violated]

    @property
    def exit_code(self) -> int:
        if self.violating_runs:
            return EXIT_VIOLATION
        if self.failed_runs:
            return EXIT_TIMEOUT
        return EXIT_OK

    def summary(self, variant: str, N: int, window: str) -> QuartileSummary:
        for s in self.summaries:
            if (s.variant, s.N, s.window) == (variant, N, window):
                return s
        raise KeyError((variant, N, window))


def make_jobs(cfg: ExperimentConfig) -> list[Job]:
    jobs = []
    problem = Problem.one_min_max(cfg.n)
    for variant in cfg.variants:
        for N in cfg.pop_sizes:
            scale = cfg.scale(variant, N)
            stop = cfg.last_window_end * scale
            for r in range(cfg.runs):
                seed = run_seed(cfg.seed, variant, N, r)
                alg = AlgorithmConfig(
                    variant=variant, problem=problem, pop_size=N, mating=cfg.mating_for(variant),
                    mutation=cfg.mutation, max_generations=cfg.safety_cap * scale + stop, seed=seed,
                    stop_after_t0=stop,
                )
                jobs.append(Job(variant, N, r, seed, alg))
    return jobs


def trace_rows(trace: RunTrace, run_index: int, generations: Iterable[int]) -> list[tuple]:
    cfg = trace.config
    evals = trace.evals
    t0 = trace.t0
    rows = []
    for g in generations:
        rows.append((run_index, cfg.seed, cfg.variant.value, cfg.pop_size, "" if t0 is None else g - t0, g,
                     int(trace.mei[g]), int(trace.extremes[g]), int(evals[g])))
    return rows


def window_generations(trace: RunTrace, windows, scale: int) -> dict[str, range]:
    """Raw generation ranges of each window; empty when ``t0`` was not reached."""
    out = {}
    for w in windows:
        label = window_label(w)
        if trace.t0 is None:
            out[label] = range(0)
            continue
        start = trace.t0 + (w[0] - 1) * scale + 1
        end = min(trace.t0 + w[1] * scale, trace.generations)
        out[label] = range(start, end + 1)
    return out


def execute(job: Job, windows, full_trace: bool, want_blocks: bool) -> RunRecord:
    trace = run(job.algorithm)
    scale = job.N if job.variant is Variant.STEADY_STATE else 1
    spans = window_generations(trace, windows, scale)
    samples = {label: trace.mei[list(span)].astype(int).tolist() for label, span in spans.items()}
    if full_trace:
        gens: Iterable[int] = range(trace.generations + 1)
    else:
        gens = sorted({g for span in spans.values() for g in span})
    blocks = None
    if want_blocks and trace.t0 is not None:
        blocks = steady_state_block_stats(trace.mei[trace.t0 + 1:], job.N)
    return RunRecord(
        variant=job.variant.value, N=job.N, run=job.run, seed=job.seed, t0=trace.t0, t1=trace.t1,
        generations=trace.generations, window_samples=samples, rows=trace_rows(trace, job.run, gens),
        violations=dict(extremes_lost=trace.extremes_lost, mei=trace.mei_violations,
                        removal=trace.removal_violations, frontier=trace.frontier_regressions),
        max_removal_cdis=trace.max_removal_cdis, blocks=blocks,
    )


def _execute_args(args):
    return execute(*args)


def run_experiment(cfg: ExperimentConfig, progress: Callable[[RunRecord], None] | None = None) -> ExperimentResult:
    """All runs of all settings; results are identical for any worker count."""
    jobs = make_jobs(cfg)
    args = [(j, cfg.windows, cfg.full_traces, j.variant is Variant.STEADY_STATE and j.run == 0) for j in jobs]
    records: list[RunRecord] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for rec in pool.map(_execute_args, args):
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        for a in args:
            rec = execute(*a)
            records.append(rec)
            if progress:
                progress(rec)
    result = ExperimentResult(cfg, records)
    for variant in cfg.variants:
        for N in cfg.pop_sizes:
            ok = [r for r in records if r.variant == variant.value and r.N == N and not r.failed]
            for w in cfg.windows:
                label = window_label(w)
                pooled = [v for r in ok for v in r.window_samples[label]]
                if pooled:
                    result.summaries.append(quartiles(pooled, variant=variant.value, N=N, window=label))
    return result


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_outputs(result: ExperimentResult, out: str | Path | None = None) -> Path:
    """``table1.csv``, ``table1.json``, one trace CSV per run, block CSVs for steady-state run 0."""
    out = Path(out if out is not None else result.config.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "table1.csv", TABLE_COLUMNS,
               [(s.variant, s.N, s.window, s.q1, s.q2, s.q3, s.samples) for s in result.summaries])
    for rec in result.records:
        _write_csv(out / f"trace_{rec.variant}_{rec.N}_{rec.run}.csv", TRACE_COLUMNS, rec.rows)
        if rec.blocks is not None:
            _write_csv(out / f"blocks_{rec.variant}_{rec.N}_{rec.run}.csv", BLOCK_COLUMNS,
                       [(b.block, b.length, b.min, b.median, b.max, int(b.partial)) for b in rec.blocks])
    cfg = result.config
    payload = {
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()
                   if k not in ("out", "workers")},
        "summaries": [asdict(s) for s in result.summaries],
        "runs": [
            {"variant": r.variant, "N": r.N, "run": r.run, "seed": r.seed, "t0": r.t0, "t1": r.t1,
             "generations": r.generations, "failed": r.failed, "violations": r.violations,
             "max_removal_cdis": r.max_removal_cdis}
            for r in result.records
        ],
        "exit_code": result.exit_code,
    }
    (out / "table1.json").write_text(json.dumps(payload, indent=2, default=str) + "\n", encoding="utf-8")
    return out


def write_trace(path: str | Path, trace: RunTrace, run_index: int = 0) -> None:
    """Every generation of one run in the trace CSV schema."""
    _write_csv(Path(path), TRACE_COLUMNS, trace_rows(trace, run_index, range(trace.generations + 1)))
