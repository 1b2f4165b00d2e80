"""Compiled kernels against the pure-Python fallback.

Times three workloads with each backend: a heap push/update/pop churn,
segment-vs-box collision queries, and full searches on desk-scale clutter
worlds. Prints one line per workload with both timings and the speedup.

    python benchmarks/bench_kernels.py [--reps 3] [--seeds 0-2]
"""
import argparse
import random
import time

import numpy as np

from lrastar import _ckernels, _pykernels
from lrastar.bench import ExperimentConfig, build_instance
from lrastar.cli import parse_seeds
from lrastar.environments import make_clutter_env_2d
from lrastar.search import SearchConfig, search


def best_of(reps, fn):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def heap_churn(mod, n=20000, ops=200000, seed=0):
    rng = random.Random(seed)
    script = [(rng.randrange(n), rng.random(), rng.random() < 0.3) for _ in range(ops)]

    def go():
        h = mod.IndexedHeap(n)
        for item, key, pop in script:
            if pop and h:
                h.pop()
            else:
                h.push(item, key)
        while h:
            h.pop()
    return go


def segments(mod, count=5000, seed=0):
    env = make_clutter_env_2d(seed, target_coverage=0.7)
    lo = np.array([b.min_corner for b in env.obstacles], dtype=float)
    hi = np.array([b.max_corner for b in env.obstacles], dtype=float)
    rng = np.random.default_rng(seed)
    p = rng.random((count, 2))
    q = np.clip(p + rng.normal(scale=0.1, size=(count, 2)), 0.0, 1.0)
    res = env.collision_resolution

    def go():
        for i in range(count):
            mod.segment_hits_boxes(p[i], q[i], lo, hi, res)
    return go


def searches(engine, seeds, alpha):
    config = ExperimentConfig(seeds=seeds)
    insts = [build_instance(config, s) for s in seeds]
    cfg = SearchConfig(alpha=alpha, engine=engine)

    def go():
        for inst in insts:
            search(inst.graph.copy(), inst.source, inst.target, cfg)
    return go


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seeds", default="0-2", help="desk seeds for the search workload")
    args = ap.parse_args(argv)
    seeds = parse_seeds(args.seeds)

    rows = [
        ("heap churn (200k ops)", heap_churn(_pykernels), heap_churn(_ckernels)),
        ("segment queries (5k)", segments(_pykernels), segments(_ckernels)),
    ]
    for a in (1, 4, "inf"):
        rows.append((f"search alpha={a} ({len(seeds)} seeds)",
                     searches("python", seeds, a), searches("compiled", seeds, a)))

    print(f"{'workload':32s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, slow, fast in rows:
        ts = best_of(args.reps, slow)
        tf = best_of(args.reps, fast)
        print(f"{name:32s} {ts:10.3f} {tf:10.3f} {ts / tf:7.1f}x")


if __name__ == "__main__":
    main()
