import csv
import io
import math

import pytest

from lrastar import bench, cli
from lrastar.bench import CSV_COLUMNS, TIME_COLUMNS, ExperimentConfig, emit_f_trace, run_trial, sweep_alpha
from lrastar.corpus import random_abstract_instance
from lrastar.errors import ConfigError, ConsistencyError
from lrastar.roadmap import write_graph

SMALL = dict(n=120, coverage=0.5)


def _strip_times(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        for c in TIME_COLUMNS:
            r.pop(c)
    return rows


def test_full_scale_config_is_accepted():
    cfg = ExperimentConfig(n=2000, coverage=0.7, seeds=(0,), alphas=(1, "inf"))
    assert cfg.n == 2000 and cfg.alphas == (1, math.inf)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(env="moon")
    with pytest.raises(ConfigError):
        ExperimentConfig(env="file")
    with pytest.raises(ConfigError):
        ExperimentConfig(alphas=(1, 2), beta=2)
    with pytest.raises(ConfigError):
        ExperimentConfig(dimension=3)
    with pytest.raises(ConfigError):
        sweep_alpha(ExperimentConfig(alphas=(2,), **SMALL))


def test_trial_is_deterministic_apart_from_time():
    cfg = ExperimentConfig(**SMALL)
    a, b = run_trial(cfg, 3, 4, replay=True), run_trial(cfg, 3, 4, replay=True)
    assert a.replay == b.replay
    assert a.evaluated_edges == b.evaluated_edges
    assert (a.rewired_node_count, a.node_update_count, a.queue_op_count) == (
        b.rewired_node_count, b.node_update_count, b.queue_op_count)


def test_larger_lookahead_never_evaluates_more():
    cfg = ExperimentConfig(**SMALL)
    for seed in range(3):
        assert run_trial(cfg, seed, "inf").edge_evaluations <= run_trial(cfg, seed, 1).edge_evaluations


def test_sweep_row_counts_and_files(tmp_path):
    cfg = ExperimentConfig(seeds=range(10), alphas=(1, 2, 3, 5, "inf"), out=str(tmp_path), **SMALL)
    res = sweep_alpha(cfg)
    assert len(res["rows"]) == 50 and len(res["aggregate"]) == 5
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 55
    assert sum(1 for l in lines if l.startswith("mean,")) == 5
    plot = (tmp_path / "plot_data.csv").read_text().splitlines()
    assert plot[0] == "alpha,mean_eval_time_us,mean_rewire_time_us,mean_total_time_us"
    assert [l.split(",")[0] for l in plot[1:]] == ["1", "2", "3", "5", "inf"]


def test_sweep_csv_is_deterministic_apart_from_time():
    cfg = ExperimentConfig(seeds=(0, 1), alphas=(1, 4, "inf"), **SMALL)
    assert _strip_times(sweep_alpha(cfg)["csv"]) == _strip_times(sweep_alpha(cfg)["csv"])


def test_sweep_flags_inconsistent_trials(monkeypatch):
    real = bench._row

    def fake(seed, alpha, config, inst, s):
        row = real(seed, alpha, config, inst, s)
        if row["alpha"] == "inf":
            row["evals"] += 1000
        return row

    monkeypatch.setattr(bench, "_row", fake)
    with pytest.raises(ConsistencyError):
        sweep_alpha(ExperimentConfig(seeds=(0,), alphas=(1, "inf"), **SMALL))

    def bad_cost(seed, alpha, config, inst, s):
        row = real(seed, alpha, config, inst, s)
        if row["alpha"] == "inf":
            row["cost"] += 0.5
        return row

    monkeypatch.setattr(bench, "_row", bad_cost)
    with pytest.raises(ConsistencyError):
        sweep_alpha(ExperimentConfig(seeds=(0,), alphas=(1, "inf"), **SMALL))


def test_f_trace_unbounded_is_sorted():
    text = emit_f_trace(ExperimentConfig(**SMALL), 2, "inf")
    rows = list(csv.DictReader(io.StringIO(text)))
    f = [float(r["f"]) for r in rows]
    assert f
    # sums along different tree paths may differ in the last ulp
    assert all(b >= a - 1e-9 for a, b in zip(f, f[1:]))
    assert max(abs(x - y) for x, y in zip(f, sorted(f))) <= 1e-9
    assert [int(r["iteration"]) for r in rows] == list(range(len(f)))


def test_f_trace_of_failed_run_is_still_emitted(tmp_path):
    g = random_abstract_instance(1, p_blocked=1.0).graph
    path = tmp_path / "g.txt"
    write_graph(g, str(path), truth=True)
    cfg = ExperimentConfig(env="file", graph_file=str(path), heuristic="zero")
    stats = run_trial(cfg, 0, "inf")
    assert stats.result_cost == math.inf and stats.popped_f_trace
    assert len(emit_f_trace(cfg, 0, "inf").splitlines()) == 1 + len(stats.popped_f_trace)


def test_f_trace_degenerate_query_is_empty(tmp_path):
    g = random_abstract_instance(1).graph
    path = tmp_path / "g.txt"
    write_graph(g, str(path), truth=True)
    cfg = ExperimentConfig(env="file", graph_file=str(path), source=0, target=0)
    assert emit_f_trace(cfg, 0, "inf").splitlines() == ["iteration,f"]


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "o"
    rc = cli.main(["--n", "100", "--coverage", "0.5", "--seeds", "0-1", "--alpha", "1,inf",
                   "--heuristic", "scaled:0.9", "--no-lazy-extend", "--replay-log",
                   "--f-trace", "--out", str(out)])
    assert rc == 0
    assert "fastest mean total time" in capsys.readouterr().out
    names = sorted(p.name for p in out.iterdir())
    assert "sweep.csv" in names and "plot_data.csv" in names
    assert "replay_seed1_alphainf.log" in names and "ftrace_seed0_alpha1.csv" in names
    log = (out / "replay_seed0_alpha1.log").read_text().splitlines()
    assert log[0].startswith("POP ")


def test_cli_single_alpha_writes_traces(tmp_path):
    rc = cli.main(["--n", "80", "--coverage", "0.3", "--seeds", "4", "--alpha", "inf",
                   "--out", str(tmp_path), "--quiet"])
    assert rc == 0 and (tmp_path / "ftrace_seed4_alphainf.csv").exists()


def test_cli_maze_and_file(tmp_path):
    assert cli.main(["--env", "maze", "--dim", "3", "--maze-depth", "2", "--n", "150", "--seeds", "0",
                     "--alpha", "1,3", "--out", str(tmp_path / "m"), "--quiet"]) == 0
    g = random_abstract_instance(9).graph
    write_graph(g, str(tmp_path / "g.txt"), truth=True)
    assert cli.main(["--env", "file", "--graph", str(tmp_path / "g.txt"), "--seeds", "0",
                     "--alpha", "1,2,inf", "--heuristic", "zero", "--out", str(tmp_path / "f"),
                     "--quiet"]) == 0


def test_cli_reports_config_errors(tmp_path, capsys):
    assert cli.main(["--alpha", "1,2", "--beta", "3", "--out", str(tmp_path)]) == 2
    assert "beta" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["--alpha", "0,x"])


def test_seed_parsing():
    assert cli.parse_seeds("0-3,10") == (0, 1, 2, 3, 10)
    assert cli.parse_seeds("7") == (7,)
