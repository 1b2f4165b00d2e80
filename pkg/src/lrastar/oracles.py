"""Independent reference solvers used to check the searcher.

None of these share code with :mod:`lrastar.search`; they agree with it
only on the tie-break order (key, then smaller vertex id). Every function
works on a private copy of the graph's evaluation state, except that
:func:`lazysp_forward` records the order in which it evaluates edges.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError
from .roadmap import RoadmapGraph

INF = math.inf

__all__ = [
    "OracleResult",
    "dijkstra_full_eval",
    "lazysp_forward",
    "enumerate_paths",
    "segment_box_intersects",
    "segment_box_chord",
]


@dataclass
class OracleResult:
    path: Optional[tuple]
    cost: float
    evaluated_edges: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.path is not None


def _shortest_path(n, adjacency, source, target, weight, h=None):
    """Textbook A*/Dijkstra with a consistent heuristic ``h``.

    ``adjacency[u]`` lists ``(v, e)``; ``weight(e)`` returns a cost or None
    to skip the edge. Heap order is ``(f, vertex)``; relaxations must be
    strict improvements.
    """
    dist = [INF] * n
    parent = [-1] * n
    closed = [False] * n
    dist[source] = 0.0
    hv = h if h is not None else [0.0] * n
    heap = [(hv[source], source)]
    while heap:
        f, u = heapq.heappop(heap)
        if closed[u] or f != dist[u] + hv[u]:
            continue
        closed[u] = True
        if u == target:
            break
        du = dist[u]
        for v, e in adjacency[u]:
            w = weight(e)
            if w is None or closed[v]:
                continue
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd + hv[v], v))
    if dist[target] == INF:
        return None, INF
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    return tuple(reversed(path)), dist[target]


def _adjacency(graph: RoadmapGraph):
    return [list(zip(graph.adj_v[u], graph.adj_e[u])) for u in range(graph.n)]


def dijkstra_full_eval(graph: RoadmapGraph, source: int, target: int) -> OracleResult:
    """Evaluate every edge, then run uniform-cost search on the free subgraph."""
    if source == target:
        return OracleResult((source,), 0.0, [])
    free = graph.ground_truth()
    weights = graph.weights
    path, cost = _shortest_path(
        graph.n, _adjacency(graph), source, target,
        lambda e: weights[e] if free[e] else None,
    )
    return OracleResult(path, cost, [])


def _heuristic_values(graph: RoadmapGraph, target: int, heuristic) -> list[float]:
    if heuristic is None or heuristic == "zero":
        return [0.0] * graph.n
    if callable(heuristic):
        return [float(heuristic(graph, v, target)) for v in range(graph.n)]
    if hasattr(heuristic, "values"):
        return heuristic.values(graph, target)
    if heuristic in ("euclid", "euclidean"):
        if graph.coords is None:
            return [0.0] * graph.n
        return np.linalg.norm(graph.coords - graph.coords[target], axis=1).tolist()
    raise ContractError(f"unsupported heuristic {heuristic!r}")


def lazysp_forward(graph: RoadmapGraph, source: int, target: int, heuristic=None) -> OracleResult:
    """LazySP with the forward edge selector, recomputed from scratch.

    Each round finds the lazily-shortest path (unknown edges at their lazy
    weight, blocked edges removed) and evaluates its first unevaluated edge
    nearest the source, until the whole path is known to be free.
    """
    if source == target:
        return OracleResult((source,), 0.0, [])
    truth = graph.ground_truth()
    weights = graph.weights
    state = [None] * graph.m  # None = unknown, True = free, False = blocked
    adjacency = _adjacency(graph)
    h = _heuristic_values(graph, target, heuristic)
    evaluated = []

    def weight(e):
        return None if state[e] is False else weights[e]

    while True:
        path, cost = _shortest_path(graph.n, adjacency, source, target, weight, h)
        if path is None:
            return OracleResult(None, INF, evaluated)
        for a, b in zip(path, path[1:]):
            e = graph.edge_index(a, b)
            if state[e] is None:
                state[e] = truth[e]
                evaluated.append((min(a, b), max(a, b)))
                break
        else:
            true_cost = 0.0
            for a, b in zip(path, path[1:]):
                true_cost += weights[graph.edge_index(a, b)]
            return OracleResult(path, true_cost, evaluated)


def enumerate_paths(graph: RoadmapGraph, source: int, target: int, max_vertices: int = 12):
    """All simple ``source -> target`` paths with (lazy cost, true cost).

    The true cost is ``inf`` when the path crosses a blocked edge.
    """
    if graph.n > max_vertices:
        raise ContractError(f"graph has {graph.n} vertices; enumeration limited to {max_vertices}")
    truth = graph.ground_truth()
    weights = graph.weights
    out = []
    on_path = [False] * graph.n

    def walk(u, path, lazy, true):
        if u == target:
            out.append((tuple(path), lazy, true))
            return
        for v, e in zip(graph.adj_v[u], graph.adj_e[u]):
            if on_path[v]:
                continue
            on_path[v] = True
            path.append(v)
            w = weights[e]
            walk(v, path, lazy + w, true + w if truth[e] else INF)
            path.pop()
            on_path[v] = False

    on_path[source] = True
    walk(source, [source], 0.0, 0.0)
    return out


def segment_box_chord(p, q, lo, hi) -> float:
    """Length of ``segment(p, q) ∩ box[lo, hi]`` (slab clipping), 0 if disjoint."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    t0, t1 = 0.0, 1.0
    for k in range(p.shape[0]):
        if d[k] == 0.0:
            if p[k] < lo[k] or p[k] > hi[k]:
                return -1.0
            continue
        a = (lo[k] - p[k]) / d[k]
        b = (hi[k] - p[k]) / d[k]
        if a > b:
            a, b = b, a
        t0 = max(t0, a)
        t1 = min(t1, b)
        if t0 > t1:
            return -1.0
    return (t1 - t0) * float(np.linalg.norm(d))


def segment_box_intersects(p, q, lo, hi) -> bool:
    """Exact closed segment/box intersection test."""
    return segment_box_chord(p, q, lo, hi) >= 0.0
