"""Seeded random problem instances for property checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environments import (
    SOURCE_ID,
    TARGET_ID,
    RoadmapSpec,
    build_roadmap,
    make_clutter_env_2d,
)
from .roadmap import RoadmapGraph, table_evaluator


@dataclass
class Instance:
    graph: RoadmapGraph
    source: int
    target: int
    seed: int


def random_abstract_instance(
    seed: int,
    min_vertices: int = 6,
    max_vertices: int = 50,
    density: float = 0.2,
    p_blocked: float = 0.3,
) -> Instance:
    """Random graph with planar coordinates and table-driven edge status.

    Each vertex pair is an edge with probability ``density``; its lazy
    weight is the Euclidean distance between the endpoints, so the
    Euclidean heuristic is admissible. Each edge is independently blocked
    with probability ``p_blocked``. Source is vertex 0, target ``n - 1``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min_vertices, max_vertices + 1))
    coords = rng.random((n, 2))
    edges = []
    free = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                w = float(np.linalg.norm(coords[a] - coords[b]))
                if w <= 0.0:
                    continue
                edges.append((a, b, w))
                free.append(bool(rng.random() >= p_blocked))
    g = RoadmapGraph(n, edges, coords=coords, evaluator=table_evaluator(free))
    return Instance(g, 0, n - 1, seed)


def abstract_corpus(count: int = 200, base_seed: int = 0, **kwargs) -> list[Instance]:
    return [random_abstract_instance(base_seed + i, **kwargs) for i in range(count)]


def random_geometric_instance(seed: int, n: int = 100, coverage: float = 0.5) -> Instance:
    """Small 2D Halton roadmap in a seeded clutter world."""
    env = make_clutter_env_2d(seed, target_coverage=coverage, mc_samples=20_000)
    spec = RoadmapSpec(dimension=2, vertex_count=n, seed=seed)
    return Instance(build_roadmap(spec, env), SOURCE_ID, TARGET_ID, seed)
