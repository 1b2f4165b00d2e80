"""Experiment runner: build worlds from seeds, sweep the lookahead, emit CSV.

Every trial is deterministic in ``(config, seed, alpha)`` except for the
timing columns. A sweep checks two things while it runs and raises
:class:`ConsistencyError` if either fails: the path cost of a seed is the
same for every lookahead, and the number of evaluated edges does not grow
as the lookahead grows.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .environments import (
    SOURCE_ID,
    TARGET_ID,
    RoadmapSpec,
    build_roadmap,
    make_clutter_env_2d,
    make_recursive_maze,
)
from .errors import ConfigError, ConsistencyError
from .roadmap import RoadmapGraph, read_graph
from .search import UNBOUNDED, Heuristic, SearchConfig, TrialStats, parse_alpha, search

__all__ = [
    "CSV_COLUMNS",
    "PLOT_COLUMNS",
    "DESK_ALPHAS",
    "ExperimentConfig",
    "build_instance",
    "run_trial",
    "sweep_alpha",
    "emit_f_trace",
    "mean_curve",
    "argmin_alpha",
    "format_alpha",
]

CSV_COLUMNS = (
    "seed", "alpha", "beta", "n_vertices", "n_edges", "evals", "blocked", "rewires",
    "updates", "queue_ops", "cost", "eval_time_us", "graph_time_us", "total_time_us",
)
TIME_COLUMNS = ("eval_time_us", "graph_time_us", "total_time_us")
PLOT_COLUMNS = ("alpha", "mean_eval_time_us", "mean_rewire_time_us", "mean_total_time_us")
DESK_ALPHAS = (1, 2, 4, 8, 16, UNBOUNDED)

# relative slack when comparing optimal costs reached along different paths
COST_RTOL = 1e-9


def format_alpha(alpha) -> str:
    return "inf" if alpha == UNBOUNDED else str(int(alpha))


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "clutter2d"
    dimension: int = 2
    n: int = 500
    radius: Optional[float] = None
    coverage: float = 0.7
    maze_depth: int = 4
    graph_file: Optional[str] = None
    source: Optional[int] = None
    target: Optional[int] = None
    seeds: tuple = tuple(range(10))
    alphas: tuple = DESK_ALPHAS
    beta: int = 1
    heuristic: str = "euclid"
    lazy_band_extension: bool = True
    eval_delay_us: float = 0.0
    check_invariants: bool = False
    engine: str = "auto"
    out: Optional[str] = None

    def __post_init__(self):
        if self.env not in ("clutter2d", "maze", "file"):
            raise ConfigError(f"unknown environment kind {self.env!r}")
        if self.env == "file" and not self.graph_file:
            raise ConfigError("env=file needs a graph file")
        if self.env == "clutter2d" and self.dimension != 2:
            raise ConfigError("clutter worlds are two-dimensional")
        alphas = tuple(parse_alpha(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        Heuristic.parse(self.heuristic)
        for a in alphas:
            if self.beta > a:
                raise ConfigError(f"beta={self.beta} exceeds alpha={format_alpha(a)}")
        if self.eval_delay_us < 0:
            raise ConfigError("evaluation delay must be non-negative")

    def search_config(self, alpha) -> SearchConfig:
        return SearchConfig(
            alpha=alpha,
            beta=self.beta,
            heuristic=Heuristic.parse(self.heuristic),
            lazy_band_extension=self.lazy_band_extension,
            check_invariants=self.check_invariants,
            engine=self.engine,
        )


@dataclass
class Instance:
    graph: RoadmapGraph
    source: int
    target: int


def build_instance(config: ExperimentConfig, seed: int) -> Instance:
    """World plus roadmap for one seed, with fresh evaluation state."""
    if config.env == "file":
        g = read_graph(config.graph_file)
        source = 0 if config.source is None else config.source
        target = g.n - 1 if config.target is None else config.target
    else:
        if config.env == "clutter2d":
            env = make_clutter_env_2d(seed, target_coverage=config.coverage)
        else:
            env = make_recursive_maze(config.dimension, config.maze_depth)
        spec = RoadmapSpec(
            dimension=config.dimension,
            vertex_count=config.n,
            connection_radius=config.radius,
            seed=seed,
        )
        g = build_roadmap(spec, env)
        source = SOURCE_ID if config.source is None else config.source
        target = TARGET_ID if config.target is None else config.target
    g.eval_delay_us = config.eval_delay_us
    return Instance(g, source, target)


def _trial(inst: Instance, config: ExperimentConfig, alpha, replay=False):
    g = inst.graph.copy()
    res = search(g, inst.source, inst.target, config.search_config(alpha), replay=replay)
    if any(k > 1 for k in g.eval_calls):
        raise ConsistencyError("an edge was evaluated more than once")
    return res.stats


def run_trial(config: ExperimentConfig, seed: int, alpha, replay: bool = False) -> TrialStats:
    """Build the seed's instance and run one search on it."""
    return _trial(build_instance(config, seed), config, parse_alpha(alpha), replay)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    return str(x)


def _row(seed, alpha, config, inst, s: TrialStats) -> dict:
    return {
        "seed": seed,
        "alpha": format_alpha(alpha),
        "beta": config.beta,
        "n_vertices": inst.graph.n,
        "n_edges": inst.graph.m,
        "evals": s.edge_evaluations,
        "blocked": s.blocked_count,
        "rewires": s.rewired_node_count,
        "updates": s.node_update_count,
        "queue_ops": s.queue_op_count,
        "cost": s.result_cost,
        "eval_time_us": round(s.eval_time * 1e6, 1),
        "graph_time_us": round(s.graph_op_time * 1e6, 1),
        "total_time_us": round(s.total_time * 1e6, 1),
        "rewire_time_us": round(s.rewire_time * 1e6, 1),
    }


def _check_seed(seed, rows):
    costs = [r["cost"] for r in rows]
    ref = costs[0]
    for r in rows[1:]:
        c = r["cost"]
        same = (c == ref) or (math.isfinite(c) and math.isfinite(ref)
                              and abs(c - ref) <= COST_RTOL * max(1.0, abs(ref)))
        if not same:
            raise ConsistencyError(
                f"seed {seed}: cost {c!r} at alpha={r['alpha']} differs from {ref!r}")
    ordered = sorted(rows, key=lambda r: parse_alpha(r["alpha"]))
    for lo, hi in zip(ordered, ordered[1:]):
        if hi["evals"] > lo["evals"]:
            raise ConsistencyError(
                f"seed {seed}: {hi['evals']} evaluations at alpha={hi['alpha']} "
                f"exceed {lo['evals']} at alpha={lo['alpha']}")


def mean_curve(rows: Sequence[dict], alphas) -> list[dict]:
    """Per-alpha means of every numeric column, in ``alphas`` order."""
    out = []
    for a in alphas:
        label = format_alpha(a)
        sel = [r for r in rows if r["alpha"] == label]
        agg = {"seed": "mean", "alpha": label}
        for col in CSV_COLUMNS[2:] + ("rewire_time_us",):
            vals = [float(r[col]) for r in sel]
            agg[col] = sum(vals) / len(vals) if vals else math.nan
        out.append(agg)
    return out


def argmin_alpha(curve: Sequence[dict], column: str = "total_time_us") -> str:
    """Alpha label with the smallest mean of ``column`` (first on ties)."""
    best = min(range(len(curve)), key=lambda i: curve[i][column])
    return curve[best]["alpha"]


def _write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    return text


def sweep_alpha(config: ExperimentConfig, replay_log: bool = False,
                f_trace: bool = False, progress=None) -> dict:
    """Run every (seed, alpha) pair; write ``sweep.csv`` and ``plot_data.csv``.

    Returns a dict with the data rows, the aggregate rows and the CSV text.
    Files are written only when ``config.out`` is set.
    """
    if len(config.seeds) < 1 or len(config.alphas) < 2:
        raise ConfigError("a sweep needs at least one seed and two alpha values")
    out = config.out
    if out is not None:
        os.makedirs(out, exist_ok=True)
    rows = []
    for seed in config.seeds:
        inst = build_instance(config, seed)
        seed_rows = []
        for a in config.alphas:
            s = _trial(inst, config, a, replay=replay_log)
            row = _row(seed, a, config, inst, s)
            seed_rows.append(row)
            if out is not None and replay_log:
                with open(os.path.join(out, f"replay_seed{seed}_alpha{format_alpha(a)}.log"), "w") as fh:
                    fh.write("\n".join(s.replay) + ("\n" if s.replay else ""))
            if out is not None and f_trace:
                _write_csv(os.path.join(out, f"ftrace_seed{seed}_alpha{format_alpha(a)}.csv"),
                           ("iteration", "f"), _trace_rows(s))
            if progress is not None:
                progress(row)
        _check_seed(seed, seed_rows)
        rows.extend(seed_rows)
    agg = mean_curve(rows, config.alphas)
    text = _write_csv(os.path.join(out, "sweep.csv") if out else None, CSV_COLUMNS, rows + agg)
    plot = [
        {"alpha": r["alpha"], "mean_eval_time_us": r["eval_time_us"],
         "mean_rewire_time_us": r["rewire_time_us"], "mean_total_time_us": r["total_time_us"]}
        for r in agg
    ]
    plot_text = _write_csv(os.path.join(out, "plot_data.csv") if out else None, PLOT_COLUMNS, plot)
    return {"rows": rows, "aggregate": agg, "csv": text, "plot_csv": plot_text}


def _trace_rows(stats: TrialStats):
    return [{"iteration": i, "f": f} for i, f in enumerate(stats.popped_f_trace)]


def emit_f_trace(config: ExperimentConfig, seed: int, alpha, path=None) -> str:
    """CSV of ``(iteration, f)`` for the values popped from the frontier."""
    stats = run_trial(config, seed, alpha)
    return _write_csv(path, ("iteration", "f"), _trace_rows(stats))


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **kw)
