import csv
import json
import math

import pytest

from nsga2_approx.algorithms import Variant
from nsga2_approx.harness import cli, experiment
from nsga2_approx.harness.config import ConfigError, ExperimentConfig, parse_config, read_config_file, with_overrides
from nsga2_approx.harness.experiment import (
    EXIT_CONFIG, EXIT_OK, EXIT_TIMEOUT, EXIT_VIOLATION, make_jobs, run_experiment, run_seed, window_generations,
    write_outputs,
)
from nsga2_approx.harness.stats import nearest_rank, quartiles, steady_state_block_stats

SMALL = ["--n", "21", "--pop-size", "8", "--runs", "2", "--seed", "5"]


def write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# ---- configuration

def test_empty_file_gives_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, "# nothing here\n\n"))
    assert cfg == ExperimentConfig()
    assert (cfg.n, cfg.pop_sizes, cfg.runs, cfg.windows) == (601, (301, 151, 76), 20, ((1, 100), (3001, 3100)))


def test_file_values_and_comments(tmp_path):
    cfg = parse_config(write(tmp_path, "n = 31  # small\nvariants=classic, steady-state\nwindows=1-10,50-60\n"))
    assert cfg.n == 31 and cfg.variants == (Variant.CLASSIC, Variant.STEADY_STATE)
    assert cfg.windows == ((1, 10), (50, 60)) and cfg.last_window_end == 60


def test_flags_override_file(tmp_path):
    cfg = parse_config(write(tmp_path, "pop_sizes=301\n"), {"pop_sizes": "151"})
    assert cfg.pop_sizes == (151,)
    assert with_overrides(cfg, runs=3, seed=None).runs == 3


@pytest.mark.parametrize("text,line", [
    ("runs=0\n", 1), ("n=10\nfoo=1\n", 2), ("\n\nn=ten\n", 3), ("n 10\n", 1),
    ("windows=0-5\n", 1), ("steady_state_mating=fair\n", 1), ("mating=roulette\n", 1),
])
def test_config_errors_carry_line_numbers(tmp_path, text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(write(tmp_path, text))
    assert err.value.line == line and f":{line}:" in str(err.value)


def test_config_error_cases():
    with pytest.raises(ConfigError):
        parse_config(None, {"bogus": 1})
    with pytest.raises(ConfigError):
        parse_config(None, {"runs": "x"})
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/exp.cfg")

def test_read_config_file_reports_lines(tmp_path):
    values, lines = read_config_file(write(tmp_path, "# header\nn=9\n\nruns=3\n"))
    assert values == {"n": 9, "runs": 3} and lines == {"n": 2, "runs": 4}


# ---- statistics

def test_quartiles():
    assert quartiles([1, 2, 3, 4]).triple() == (1, 2, 3)
    assert quartiles([7] * 9).triple() == (7, 7, 7)
    assert quartiles([5]).triple() == (5, 5, 5)
    q = quartiles(list(range(2000)))
    assert q.triple() == (499, 999, 1499) and q.samples == 2000
    with pytest.raises(ValueError):
        quartiles([])
    assert nearest_rank([1, 2, 3], 1.0) == 3


def test_block_stats():
    blocks = steady_state_block_stats([3] * 10, 4)
    assert [(b.length, b.min, b.median, b.max, b.partial) for b in blocks] == [
        (4, 3, 3, 3, False), (4, 3, 3, 3, False), (2, 3, 3, 3, True)]
    blocks = steady_state_block_stats([5, 1, 9, 2, 2, 2], 3)
    assert [(b.min, b.median, b.max) for b in blocks] == [(1, 5, 9), (2, 2, 2)]
    # generation g (1-based) lands in block ceil(g/N)
    N, values = 7, list(range(1, 50))
    for b in steady_state_block_stats(values, N):
        assert all(math.ceil(g / N) == b.block for g in range(b.min, b.max + 1))
    with pytest.raises(ValueError):
        steady_state_block_stats([1], 0)


# ---- experiment plumbing

def test_seeds_are_per_setting_and_run():
    seeds = {run_seed(1, v, N, r) for v in Variant for N in (8, 9) for r in range(5)}
    assert len(seeds) == 30
    assert run_seed(1, "classic", 8, 0) == run_seed(1, Variant.CLASSIC, 8, 0)


def test_jobs_scale_steady_state():
    cfg = ExperimentConfig(n=21, pop_sizes=(8,), runs=1, windows=((1, 10),), safety_cap=100)
    jobs = {j.variant: j.algorithm for j in make_jobs(cfg)}
    assert jobs[Variant.CLASSIC].stop_after_t0 == 10
    assert jobs[Variant.STEADY_STATE].stop_after_t0 == 80
    assert jobs[Variant.STEADY_STATE].max_generations == 800 + 80
    assert jobs[Variant.STEADY_STATE].mating.value == "random"


def test_windows_are_relative_to_t0():
    class T:
        t0, generations = 5, 40
    assert window_generations(T, ((1, 3), (10, 12)), 1) == {"1-3": range(6, 9), "10-12": range(15, 18)}
    assert window_generations(T, ((1, 2),), 4) == {"1-2": range(6, 14)}
    T.t0 = None
    assert window_generations(T, ((1, 2),), 1) == {"1-2": range(0)}


def small_config(tmp_path, **kw):
    base = dict(n=21, pop_sizes=(8, 6), runs=2, seed=5, windows=((1, 10), (30, 40)), out=str(tmp_path),
                safety_cap=2000)
    base.update(kw)
    return ExperimentConfig(**base)


def test_experiment_outputs(tmp_path):
    cfg = small_config(tmp_path)
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK and not result.failed_runs
    out = write_outputs(result)
    rows = list(csv.DictReader(open(out / "table1.csv", encoding="utf-8")))
    assert len(rows) == 3 * 2 * 2
    for r in rows:
        assert int(r["q1"]) <= int(r["q2"]) <= int(r["q3"])
        scale = int(r["N"]) if r["variant"] == "steady-state" else 1
        length = 10 if r["window"] == "1-10" else 11
        assert int(r["samples"]) == 2 * length * scale
    trace = list(csv.reader(open(out / "trace_current-cd_8_0.csv", encoding="utf-8")))
    assert trace[0] == list(experiment.TRACE_COLUMNS) and len(trace) == 1 + 21
    assert trace[1][4] == "1"
    assert (out / "blocks_steady-state_8_0.csv").exists()
    payload = json.loads((out / "table1.json").read_text())
    assert payload["exit_code"] == 0 and len(payload["runs"]) == 12
    assert "out" not in payload["config"]
    raw = (out / "table1.csv").read_bytes()
    assert b"\r\n" not in raw and b'"' not in raw


def test_outputs_are_reproducible_and_worker_independent(tmp_path):
    a = write_outputs(run_experiment(small_config(tmp_path / "a")))
    b = write_outputs(run_experiment(small_config(tmp_path / "b", workers=2)))
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_timeouts_are_flagged(tmp_path):
    cfg = small_config(tmp_path, n=300, pop_sizes=(4,), variants=(Variant.CLASSIC,), runs=1, safety_cap=1,
                       windows=((1, 1),))
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_TIMEOUT and len(result.failed_runs) == 1
    assert result.summaries == []


# ---- command line

def test_cli_table1(tmp_path, capsys):
    code = cli.main(["table1", *SMALL, "--variant", "current-cd", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert (tmp_path / "table1.csv").exists() and (tmp_path / "trace_current-cd_8_1.csv").exists()
    assert "current-cd" in capsys.readouterr().out


def test_cli_table1_full_traces(tmp_path):
    cfg = write(tmp_path, "windows=1-5\n")
    cli.main(["table1", *SMALL, "--variant", "classic", "--config", str(cfg), "--out", str(tmp_path / "o"),
              "--full-traces"])
    rows = list(csv.reader(open(tmp_path / "o" / "trace_classic_8_0.csv")))
    assert rows[1][5] == "0"


def test_cli_run_writes_full_trace(tmp_path, capsys):
    code = cli.main(["run", "--n", "15", "--pop-size", "6", "--variant", "steady-state", "--mating", "tournament",
                     "--max-generations", "50", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "trace_steady-state_6_0.csv")))
    assert len(rows) == 52 and [r[8] for r in rows[1:3]] == ["6", "7"]
    status = json.loads(capsys.readouterr().out.splitlines()[0])
    assert status["generations"] == 50


def test_cli_run_rejects_lists(tmp_path):
    assert cli.main(["run", "--pop-size", "8,9", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_scenario(tmp_path, capsys):
    code = cli.main(["scenario", "--kind", "adversarial", "--n", "30", "--trials", "5", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "scenario_adversarial_classic.csv")))
    assert rows[0] == ["trial", "mei"] and {r[1] for r in rows[1:]} == {"12"}
    assert json.loads(capsys.readouterr().out)["quartiles"] == [12, 12, 12]


def test_cli_metrics(tmp_path, capsys):
    f = write(tmp_path, "n=8\n0\n2\n5\n8\n", "front.txt")
    assert cli.main(["metrics", str(f)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mei"] == 3 and report["hv"] == 21.0
    assert cli.main(["metrics", str(f), "--ref=-1,-1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["hv"] == 21.0 + 8 + 8 + 1


@pytest.mark.parametrize("text", ["0\n1\n", "n=4\n9\n", "n=4\nx\n", "n=4\n"])
def test_cli_metrics_bad_files(tmp_path, text):
    assert cli.main(["metrics", str(write(tmp_path, text, "f.txt"))]) == EXIT_CONFIG


def test_cli_config_errors(tmp_path, capsys):
    bad = write(tmp_path, "runs=1\nruns=0\n")
    assert cli.main(["table1", "--config", str(bad)]) == EXIT_CONFIG
    assert ":2:" in capsys.readouterr().err
    assert cli.main(["table1", "--variant", "nsga3"]) == EXIT_CONFIG
    assert cli.main(["frobnicate"]) == EXIT_CONFIG
    assert cli.main(["metrics", "x", "--ref", "1,0"]) == EXIT_CONFIG


def test_cli_timeout_exit(tmp_path):
    cfg = write(tmp_path, "safety_cap=1\nwindows=1-1\n")
    code = cli.main(["table1", "--n", "300", "--pop-size", "4", "--variant", "classic", "--runs", "1",
                     "--config", str(cfg), "--out", str(tmp_path)])
    assert code == EXIT_TIMEOUT


def test_cli_violation_exit(tmp_path, monkeypatch):
    real = experiment.run

    def broken(config):
        trace = real(config)
        trace.mei_violations += 1
        return trace

    monkeypatch.setattr(experiment, "run", broken)
    code = cli.main(["table1", *SMALL, "--variant", "current-cd", "--out", str(tmp_path)])
    assert code == EXIT_VIOLATION
    assert json.loads((tmp_path / "table1.json").read_text())["exit_code"] == EXIT_VIOLATION


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "nsga2_approx", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "table1" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "nsga2_approx", "run", "--runs", "0"], capture_output=True)
    assert proc.returncode == EXIT_CONFIG
