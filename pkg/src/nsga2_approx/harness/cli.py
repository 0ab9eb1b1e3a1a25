"""Command line: ``run``, ``table1``, ``scenario`` and ``metrics``.

Exit status: 0 success, 1 configuration error, 2 theorem-assertion violation,
3 extremes not found within the safety cap.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from ..algorithms import AlgorithmConfig, run
from ..core import ConfigurationError, RngHandle
from ..metrics import FrontSubset, ReferencePoint, metric_report
from ..problems import Problem
from ..scenarios import Scenario, SelectionEngine, run_selection_trials
from ..variation import MatingScheme
from .config import ConfigError, ExperimentConfig, parse_config, read_config_file
from .experiment import EXIT_CONFIG, EXIT_OK, EXIT_TIMEOUT, EXIT_VIOLATION, run_experiment, run_seed, write_outputs, write_trace


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--n", help="problem size")
    p.add_argument("--pop-size", help="population size N (comma list for table1)")
    p.add_argument("--variant", help="classic | current-cd | steady-state (comma list for table1)")
    p.add_argument("--mating", help="fair | random | tournament (steady state never uses fair)")
    p.add_argument("--mutation", help="one-bit | bitwise")
    p.add_argument("--runs", help="independent runs per setting")
    p.add_argument("--seed", help="master seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsga2-approx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one configuration, full per-generation trace CSV")
    _common(p)
    p.add_argument("--max-generations", type=int, help="stop after this many generations instead of the window end")

    p = sub.add_parser("table1", help="replicate the MEI quartile table")
    _common(p)
    p.add_argument("--full-traces", action="store_true", help="write every generation, not just the windows")

    p = sub.add_parser("scenario", help="one-step selection trials on a synthetic combined population")
    _common(p)
    p.add_argument("--kind", default="full-coverage", choices=["full-coverage", "adversarial"])
    p.add_argument("--engine", default="classic", choices=["classic", "current-cd"])
    p.add_argument("--trials", help="number of trials (default 1000)")

    p = sub.add_parser("metrics", help="MetricReport JSON for a front-subset file")
    p.add_argument("file", help="header line n=<value>, then one f1 value per line")
    p.add_argument("--ref", default="0,0", help="reference point r1,r2 (both <= 0); write negatives as --ref=-1,-1")
    return parser


def _overrides(args) -> dict:
    ov = {
        "n": args.n, "pop_sizes": args.pop_size, "variants": args.variant, "mutation": args.mutation,
        "runs": args.runs, "seed": args.seed, "out": args.out, "workers": args.workers,
    }
    if args.mating is not None:
        ov["mating"] = args.mating
        if args.mating != MatingScheme.FAIR.value:
            ov["steady_state_mating"] = args.mating
    if getattr(args, "full_traces", False):
        ov["full_traces"] = True
    if getattr(args, "trials", None) is not None:
        ov["trials"] = args.trials
    return ov


def _config(args) -> ExperimentConfig:
    return parse_config(args.config, _overrides(args))


def cmd_run(args) -> int:
    overrides = _overrides(args)
    if args.runs is None and (args.config is None or "runs" not in read_config_file(args.config)[0]):
        overrides["runs"] = 1
    cfg = parse_config(args.config, overrides)
    if len(cfg.variants) != 1 or len(cfg.pop_sizes) != 1:
        raise ConfigError("run takes a single --variant and a single --pop-size")
    variant, N = cfg.variants[0], cfg.pop_sizes[0]
    scale = cfg.scale(variant, N)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = EXIT_OK
    for r in range(cfg.runs):
        stop = cfg.last_window_end * scale
        alg = AlgorithmConfig(
            variant=variant, problem=Problem.one_min_max(cfg.n), pop_size=N, mating=cfg.mating_for(variant),
            mutation=cfg.mutation, seed=run_seed(cfg.seed, variant, N, r),
            max_generations=args.max_generations if args.max_generations is not None else cfg.safety_cap * scale + stop,
            stop_after_t0=None if args.max_generations is not None else stop,
        )
        trace = run(alg)
        path = out / f"trace_{variant.value}_{N}_{r}.csv"
        write_trace(path, trace, r)
        status = {"run": r, "seed": alg.seed, "t0": trace.t0, "t1": trace.t1, "generations": trace.generations,
                  "final_mei": int(trace.mei[-1]), "violations": trace.theorem_violations, "trace": str(path)}
        print(json.dumps(status))
        if trace.theorem_violations:
            worst = EXIT_VIOLATION
        elif trace.t0 is None and args.max_generations is None and worst == EXIT_OK:
            worst = EXIT_TIMEOUT
    return worst


def cmd_table1(args) -> int:
    cfg = _config(args)

    def progress(rec):
        state = "FAILED" if rec.failed else f"t0={rec.t0}"
        print(f"{rec.variant:>12} N={rec.N:<4} run {rec.run:>2}: {state}", file=sys.stderr, flush=True)

    result = run_experiment(cfg, progress)
    out = write_outputs(result)
    for s in result.summaries:
        print(f"{s.variant:>12} N={s.N:<4} [{s.window}] ({s.q1},{s.q2},{s.q3}) m={s.samples}")
    print(f"outputs in {out}")
    for rec in result.violating_runs:
        print(f"theorem violation: {rec.variant} N={rec.N} run {rec.run}: {rec.violations}", file=sys.stderr)
    for rec in result.failed_runs:
        print(f"extremes not found: {rec.variant} N={rec.N} run {rec.run}", file=sys.stderr)
    return result.exit_code


def cmd_scenario(args) -> int:
    cfg = _config(args)
    scenario = Scenario(args.kind, cfg.n)
    engine = SelectionEngine(args.engine)
    stats = run_selection_trials(scenario, engine, cfg.trials, RngHandle(cfg.seed))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"scenario_{scenario.kind.value}_{engine.value}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("trial", "mei"))
        w.writerows(enumerate(stats.samples))
    q = stats.quartiles
    print(json.dumps({"kind": scenario.kind.value, "engine": engine.value, "n": cfg.n, "N": scenario.N,
                      "trials": len(stats), "quartiles": [q.q1, q.q2, q.q3], "min": min(stats.samples),
                      "max": max(stats.samples), "csv": str(path)}))
    return EXIT_OK


def read_front_file(path: str | Path) -> FrontSubset:
    try:
        lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    except OSError as exc:
        raise ConfigError(f"cannot read front file: {exc.strerror}", source=str(path)) from None
    body = [(i, ln) for i, ln in enumerate(lines, start=1) if ln]
    if not body or not body[0][1].replace(" ", "").startswith("n="):
        raise ConfigError("first line must be n=<value>", body[0][0] if body else 1, str(path))
    try:
        n = int(body[0][1].split("=", 1)[1])
    except ValueError:
        raise ConfigError(f"bad header {body[0][1]!r}", body[0][0], str(path)) from None
    values = []
    for i, ln in body[1:]:
        try:
            v = int(ln)
        except ValueError:
            raise ConfigError(f"not an integer: {ln!r}", i, str(path)) from None
        if not 0 <= v <= n:
            raise ConfigError(f"f1 value {v} outside [0..{n}]", i, str(path))
        values.append(v)
    if not values:
        raise ConfigError("no f1 values", source=str(path))
    try:
        return FrontSubset.of(n, values)
    except ValueError as exc:
        raise ConfigError(str(exc), source=str(path)) from None


def cmd_metrics(args) -> int:
    S = read_front_file(args.file)
    try:
        r1, r2 = (float(t) for t in args.ref.split(","))
        ref = ReferencePoint(r1, r2)
    except ValueError as exc:
        raise ConfigError(f"bad --ref {args.ref!r}: {exc}") from None
    print(json.dumps(metric_report(S, ref).to_dict(), indent=2))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "table1": cmd_table1, "scenario": cmd_scenario, "metrics": cmd_metrics}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
