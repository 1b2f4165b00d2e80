"""Acceptance gate: one PASS/FAIL line per criterion.

Criteria 1-6 run the reference engine with the full invariant sweep on;
the desk-scale criteria 7, 8 and 11 go through the command line and the
compiled engine, whose node writes always check the budget bound. Every
search in this module counts budget-bound failures (criterion 10) and
per-edge evaluator calls (criterion 9).
"""
import csv
import math
import os

import pytest

from lrastar import cli
from lrastar.bench import TIME_COLUMNS
from lrastar.corpus import abstract_corpus, random_geometric_instance
from lrastar.oracles import dijkstra_full_eval, lazysp_forward
from lrastar.search import SearchConfig, search

REPORT = {}
ALPHAS = (1, 2, 3, 5, "inf")
DESK_SEEDS = "0-9"
DESK_ALPHAS = "1,2,4,8,16,inf"
COUNTERS = {"budget": 0, "multi_eval": 0, "searches": 0}


def report(capsys, key, ok, text, soft=False):
    tag = "PASS" if ok else ("SOFT-FAIL" if soft else "FAIL")
    line = f"criterion {key}: {tag} - {text}" if isinstance(key, int) else f"{key}: {text}"
    REPORT[key] = line
    with capsys.disabled():
        print("\n" + line)


def alpha_value(a):
    return math.inf if a == "inf" else a


@pytest.fixture(scope="module")
def corpus():
    return abstract_corpus(200)


def run(graph, s, t, replay=False, **kw):
    """One search on a fresh copy; budget failures and re-evaluations are tallied."""
    kw.setdefault("engine", "python")
    kw.setdefault("check_invariants", kw["engine"] == "python")
    g = graph.copy()
    COUNTERS["searches"] += 1
    try:
        res = search(g, s, t, SearchConfig(**kw), replay=replay)
    except AssertionError as exc:
        if "budget" in str(exc):
            COUNTERS["budget"] += 1
        raise
    COUNTERS["multi_eval"] += sum(1 for k in g.eval_calls if k > 1)
    return res


def test_c01_oracle_equivalence(corpus, capsys):
    bad = total = 0
    for inst in corpus:
        ref = dijkstra_full_eval(inst.graph, inst.source, inst.target)
        for a in ALPHAS:
            for beta in (1, 2):
                if a != "inf" and beta > a:
                    continue
                r = run(inst.graph, inst.source, inst.target, alpha=a, beta=beta)
                total += 1
                if r.found != ref.found or r.cost != ref.cost:
                    bad += 1
    solvable = sum(1 for i in corpus if dijkstra_full_eval(i.graph, i.source, i.target).found)
    report(capsys, 1, bad == 0, f"{total} searches on {len(corpus)} graphs "
           f"({solvable} solvable), {bad} cost/failure mismatches vs full evaluation")
    assert bad == 0


def test_c02_alpha_containment(corpus, capsys):
    bad = pairs = 0
    for inst in corpus:
        for h in ("zero", "euclid"):
            sets = {a: run(inst.graph, inst.source, inst.target, alpha=a, heuristic=h,
                           lazy_band_extension=False).stats.evaluated_edge_set for a in ALPHAS}
            for a1 in ALPHAS:
                for a2 in ALPHAS:
                    if alpha_value(a1) > alpha_value(a2):
                        pairs += 1
                        bad += not sets[a1] <= sets[a2]
    report(capsys, 2, bad == 0, f"{pairs} (alpha1 > alpha2) pairs, {bad} containment violations")
    assert bad == 0


def test_c03_lazysp_equivalence(corpus, capsys):
    bad = {"zero": 0, "euclid": 0}
    for inst in corpus:
        for h in bad:
            ours = run(inst.graph, inst.source, inst.target, alpha="inf", heuristic=h)
            ref = lazysp_forward(inst.graph, inst.source, inst.target, heuristic=h)
            bad[h] += ours.stats.evaluated_edges != ref.evaluated_edges
    ok = bad["zero"] == 0 and bad["euclid"] == 0
    report(capsys, 3, ok, f"{len(corpus)} graphs, sequence mismatches: zero heuristic "
           f"{bad['zero']}, Euclidean heuristic {bad['euclid']}")
    assert ok


def test_c04_heuristic_dominance(capsys):
    insts = []
    seed = 0
    while len(insts) < 100:
        inst = random_geometric_instance(seed, n=100)
        seed += 1
        coords = inst.graph.coords
        d = ((coords - coords[inst.target]) ** 2).sum(axis=1)
        d[inst.target] = 1.0
        if d.min() > 0.0:
            insts.append(inst)
    bad = checks = 0
    for inst in insts:
        for a in (1, 3, "inf"):
            for lazy in (True, False):
                e = run(inst.graph, inst.source, inst.target, alpha=a, heuristic="euclid",
                        lazy_band_extension=lazy).stats.evaluated_edge_set
                z = run(inst.graph, inst.source, inst.target, alpha=a, heuristic="zero",
                        lazy_band_extension=lazy).stats.evaluated_edge_set
                checks += 1
                bad += not e <= z
    report(capsys, 4, bad == 0, f"{len(insts)} roadmaps x alpha {{1,3,inf}} x lazy extension on/off, "
           f"{bad} of {checks} checks violated E(euclid) <= E(zero)")
    assert bad == 0


def test_c05_beta_dominance(corpus, capsys):
    bad = checks = 0
    for inst in corpus:
        for a in (3, 5):
            base = run(inst.graph, inst.source, inst.target, alpha=a, beta=1).stats.evaluated_edge_set
            for beta in (2, 3):
                other = run(inst.graph, inst.source, inst.target, alpha=a, beta=beta).stats.evaluated_edge_set
                checks += 1
                bad += not base <= other
    report(capsys, 5, bad == 0, f"{checks} checks, {bad} violations of E(beta=1) <= E(beta)")
    assert bad == 0


def test_c06_f_trace_monotone(corpus, capsys):
    bad = 0
    worst = 0.0
    for inst in corpus:
        for h in ("zero", "euclid"):
            f = run(inst.graph, inst.source, inst.target, alpha="inf", heuristic=h).stats.popped_f_trace
            drops = [a - b for a, b in zip(f, f[1:])]
            worst = max([worst] + drops)
            bad += any(d > 1e-9 for d in drops)
    report(capsys, 6, bad == 0, f"{2 * len(corpus)} unbounded runs, {bad} traces decrease by more "
           f"than 1e-9 (largest drop {worst:.1e})")
    assert bad == 0


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def desk_sweep(out, seeds=DESK_SEEDS, extra=()):
    COUNTERS["searches"] += 6 * len(cli.parse_seeds(seeds))
    try:
        rc = cli.main(["--env", "clutter2d", "--n", "500", "--coverage", "0.7", "--seeds", seeds,
                       "--alpha", DESK_ALPHAS, "--out", str(out), "--quiet", *extra])
    except AssertionError as exc:
        if "budget" in str(exc):
            COUNTERS["budget"] += 1
        raise
    if rc != 0:
        # the sweep raises on repeated evaluations and cross-alpha inconsistencies
        raise AssertionError(f"lrastar exited with {rc}")
    return read_rows(os.path.join(out, "sweep.csv"))


@pytest.fixture(scope="module")
def desk_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("desk")


def test_c07_eval_count_monotone(desk_dir, capsys):
    rows = [r for r in desk_sweep(desk_dir / "a") if r["seed"] != "mean"]
    bad = 0
    by_seed = {}
    for r in rows:
        by_seed.setdefault(r["seed"], []).append(int(r["evals"]))
    for seed, evals in by_seed.items():
        bad += any(b > a for a, b in zip(evals, evals[1:]))
    means = [round(sum(v[i] for v in by_seed.values()) / len(by_seed), 1) for i in range(6)]
    report(capsys, 7, bad == 0 and len(by_seed) == 10,
           f"{len(by_seed)} seeds, {bad} seeds with a count increase; mean evaluations over "
           f"alpha {DESK_ALPHAS}: {means}")
    assert bad == 0 and len(by_seed) == 10


def test_c08_interior_optimum(tmp_path, capsys):
    interior = 0
    curves = []
    for k in range(10):
        seeds = f"{10 * k}-{10 * k + 9}"
        desk_sweep(tmp_path / f"s{k}", seeds, ("--eval-delay-us", "200"))
        plot = read_rows(tmp_path / f"s{k}" / "plot_data.csv")
        totals = [float(r["mean_total_time_us"]) for r in plot]
        best = min(range(len(totals)), key=totals.__getitem__)
        interior += 0 < best < len(totals) - 1
        curves.append(f"set{k}: argmin alpha={plot[best]['alpha']} "
                      + "/".join(f"{t / 1e3:.0f}" for t in totals))
    ok = interior >= 7
    report(capsys, 8, ok, f"{interior}/10 seed sets have the minimum mean total time at "
           f"1 < alpha < inf (need 7); mean total ms over alpha {DESK_ALPHAS}: " + "; ".join(curves),
           soft=True)
    # soft criterion: reported with its curve, never failing the suite


def test_c09_single_evaluation(capsys):
    ok = COUNTERS["multi_eval"] == 0
    report(capsys, 9, ok, f"{COUNTERS['searches']} searches, {COUNTERS['multi_eval']} edges "
           "evaluated more than once")
    assert ok


def test_c10_budget_bound(capsys):
    ok = COUNTERS["budget"] == 0
    report(capsys, 10, ok, f"budget assertion active in every search above; {COUNTERS['budget']} violations")
    assert ok


def test_c11_determinism(desk_dir, capsys):
    first = read_rows(os.path.join(desk_dir / "a", "sweep.csv"))
    second = desk_sweep(desk_dir / "b")
    strip = lambda rows: [{k: v for k, v in r.items() if k not in TIME_COLUMNS} for r in rows]
    a = strip(first)
    b = strip(second)
    # aggregate rows carry means of time columns only in the stripped fields
    ok = a == b and len(a) == 66
    report(capsys, 11, ok, f"re-run of the desk preset: {len(a)} rows, identical outside time columns: {a == b}")
    assert ok


def test_side_properties(corpus, capsys):
    """Reported, never asserted: nested lookahead with batching, lazy
    extension edge sets, node-update growth and intermediate-alpha f-traces.
    Only the lazy-extension cost equality is asserted."""
    nested = nested_bad = 0
    lazy_diff = cost_bad = 0
    growth_bad = 0
    nonmono = 0
    for inst in corpus:
        s, t = inst.source, inst.target
        for beta in (2, 3):
            for a1 in (3, 5, "inf"):
                for a2 in (1, 2, 3):
                    if beta > a2 or alpha_value(a1) < a2 + beta - 1:
                        continue
                    e1 = run(inst.graph, s, t, alpha=a1, beta=1).stats.evaluated_edge_set
                    e2 = run(inst.graph, s, t, alpha=a2, beta=beta).stats.evaluated_edge_set
                    nested += 1
                    nested_bad += not e1 <= e2
        updates = []
        for a in ALPHAS:
            on = run(inst.graph, s, t, alpha=a)
            off = run(inst.graph, s, t, alpha=a, lazy_band_extension=False)
            lazy_diff += on.stats.evaluated_edge_set != off.stats.evaluated_edge_set
            cost_bad += on.cost != off.cost
            updates.append(off.stats.node_update_count)
            if a != "inf":
                f = on.stats.popped_f_trace
                nonmono += any(x - y > 1e-9 for x, y in zip(f, f[1:]))
        growth_bad += any(y < x for x, y in zip(updates, updates[1:]))
    report(capsys, "nested lookahead with batching", True,
           f"{nested_bad} of {nested} checks violate E(alpha1, beta=1) <= E(alpha2, beta) "
           "for alpha1 >= alpha2 + beta - 1")
    report(capsys, "lazy band extension", cost_bad == 0,
           f"{cost_bad} cost mismatches (asserted); edge sets differ on {lazy_diff} of "
           f"{len(corpus) * len(ALPHAS)} runs")
    report(capsys, "node-update growth", True,
           f"{growth_bad} of {len(corpus)} graphs have node updates decreasing somewhere in alpha")
    report(capsys, "intermediate-alpha f-trace", True,
           f"{nonmono} of {len(corpus) * 4} finite-alpha runs pop a decreasing f-value")
    assert cost_bad == 0
