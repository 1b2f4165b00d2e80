"""Lazy roadmap graphs.

Edges are stored undirected. Each carries a lazy weight (a tight lower
bound on its true cost) and a memoized status: an edge starts ``UNKNOWN``
and the first call to :meth:`RoadmapGraph.evaluate_edge` runs the injected
evaluator and fixes it to ``FREE`` (true cost = lazy weight) or ``BLOCKED``
(true cost = +inf). Blocked edges vanish from :meth:`RoadmapGraph.neighbors`.
"""
from __future__ import annotations

import enum
import io
import math
import os
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import ContractError

__all__ = [
    "EdgeStatus",
    "RoadmapGraph",
    "PathView",
    "lazy_weight",
    "evaluate_edge",
    "path_costs",
    "table_evaluator",
    "read_graph",
    "write_graph",
]


class EdgeStatus(enum.IntEnum):
    UNKNOWN = 0
    FREE = 1
    BLOCKED = 2


_STATUS_LETTER = {EdgeStatus.UNKNOWN: "U", EdgeStatus.FREE: "F", EdgeStatus.BLOCKED: "B"}
_LETTER_STATUS = {v: k for k, v in _STATUS_LETTER.items()}

Evaluator = Callable[[int], bool]


def table_evaluator(free: Sequence[bool]) -> Evaluator:
    """Evaluator answering from a precomputed per-edge table (True = free)."""
    table = [bool(x) for x in free]
    return table.__getitem__


def _always_free(e: int) -> bool:
    return True


class RoadmapGraph:
    """Undirected graph with lazy edge weights and memoized edge evaluation.

    Parameters
    ----------
    n : int
        Number of vertices; ids are ``0 .. n-1``.
    edges : iterable of (a, b, lazy_weight)
        Undirected edges. Endpoints are normalised so that ``a < b``.
    coords : array_like, optional
        ``(n, d)`` vertex coordinates; ``None`` for abstract graphs.
    evaluator : callable, optional
        ``evaluator(edge_index) -> bool`` returning True when the edge is
        collision-free. Defaults to "every edge is free".
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        coords=None,
        evaluator: Optional[Evaluator] = None,
    ):
        if n < 0:
            raise ContractError("vertex count must be non-negative")
        self.n = int(n)
        if coords is not None:
            coords = np.asarray(coords, dtype=float)
            if coords.ndim != 2 or coords.shape[0] != self.n:
                raise ContractError("coords must have shape (n, d)")
        self.coords = coords
        self.evaluator: Evaluator = evaluator if evaluator is not None else _always_free

        self.edge_a: list[int] = []
        self.edge_b: list[int] = []
        self.weights: list[float] = []
        self._index: dict[tuple[int, int], int] = {}
        self.adj_v: list[list[int]] = [[] for _ in range(self.n)]
        self.adj_e: list[list[int]] = [[] for _ in range(self.n)]
        for a, b, w in edges:
            self._add_edge(int(a), int(b), float(w))

        m = len(self.weights)
        self.status: list[int] = [EdgeStatus.UNKNOWN] * m
        self.eval_calls: list[int] = [0] * m
        self.eval_count = 0
        self.eval_time = 0.0
        self.eval_delay_us = 0.0

    def _add_edge(self, a: int, b: int, w: float) -> None:
        if a == b:
            raise ContractError(f"self-loop on vertex {a}")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise ContractError(f"edge ({a}, {b}) references a missing vertex")
        if not (w > 0.0 and math.isfinite(w)):
            raise ContractError(f"lazy weight must be positive and finite, got {w!r}")
        if a > b:
            a, b = b, a
        if (a, b) in self._index:
            raise ContractError(f"duplicate edge ({a}, {b})")
        e = len(self.weights)
        self._index[(a, b)] = e
        self.edge_a.append(a)
        self.edge_b.append(b)
        self.weights.append(w)
        self.adj_v[a].append(b)
        self.adj_e[a].append(e)
        self.adj_v[b].append(a)
        self.adj_e[b].append(e)

    # -- basic queries ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return 0 if self.coords is None else int(self.coords.shape[1])

    def endpoints(self, e: int) -> tuple[int, int]:
        self._check_edge(e)
        return self.edge_a[e], self.edge_b[e]

    def edge_index(self, a: int, b: int) -> int:
        """Index of the undirected edge ``{a, b}``; KeyError if absent."""
        key = (a, b) if a < b else (b, a)
        return self._index[key]

    def has_edge(self, a: int, b: int) -> bool:
        key = (a, b) if a < b else (b, a)
        return key in self._index

    def neighbors(self, u: int):
        """Yield ``(v, e)`` over non-blocked edges incident to ``u``."""
        status = self.status
        for v, e in zip(self.adj_v[u], self.adj_e[u]):
            if status[e] != EdgeStatus.BLOCKED:
                yield v, e

    def _check_edge(self, e: int) -> None:
        if not (0 <= e < len(self.weights)):
            raise IndexError(f"invalid edge index {e}")

    # -- weight model ----------------------------------------------------

    def lazy_weight(self, e: int) -> float:
        self._check_edge(e)
        return self.weights[e]

    def true_weight(self, e: int) -> float:
        """True cost of an already-evaluated edge (never triggers evaluation)."""
        s = self.status[e]
        if s == EdgeStatus.UNKNOWN:
            raise ContractError(f"edge {e} has not been evaluated")
        return self.weights[e] if s == EdgeStatus.FREE else math.inf

    def evaluate_edge(self, e: int) -> tuple[EdgeStatus, float]:
        """Evaluate edge ``e`` once; later calls return the memoized answer."""
        self._check_edge(e)
        s = self.status[e]
        if s != EdgeStatus.UNKNOWN:
            return EdgeStatus(s), (self.weights[e] if s == EdgeStatus.FREE else math.inf)
        t0 = time.perf_counter()
        free = self.evaluator(e)
        if self.eval_delay_us > 0:
            deadline = t0 + self.eval_delay_us * 1e-6
            while time.perf_counter() < deadline:
                pass
        self.eval_time += time.perf_counter() - t0
        self.eval_calls[e] += 1
        self.eval_count += 1
        s = EdgeStatus.FREE if free else EdgeStatus.BLOCKED
        self.status[e] = s
        return s, (self.weights[e] if free else math.inf)

    # -- state management ------------------------------------------------

    def reset_evaluations(self) -> None:
        """Forget all memoized evaluations and counters."""
        m = len(self.weights)
        self.status = [EdgeStatus.UNKNOWN] * m
        self.eval_calls = [0] * m
        self.eval_count = 0
        self.eval_time = 0.0

    def copy(self) -> "RoadmapGraph":
        """Independent copy with fresh evaluation state.

        Geometry (coordinates, adjacency, weights) is shared read-only.
        """
        g = RoadmapGraph.__new__(RoadmapGraph)
        g.n = self.n
        g.coords = self.coords
        g.evaluator = self.evaluator
        g.edge_a = self.edge_a
        g.edge_b = self.edge_b
        g.weights = self.weights
        g._index = self._index
        g.adj_v = self.adj_v
        g.adj_e = self.adj_e
        g.eval_delay_us = self.eval_delay_us
        g.reset_evaluations()
        return g

    def ground_truth(self) -> list[bool]:
        """Evaluator answer for every edge, without touching memoized state."""
        return [bool(self.evaluator(e)) for e in range(self.m)]

    def __repr__(self):
        return f"RoadmapGraph(n={self.n}, m={self.m}, dim={self.dim})"


def lazy_weight(graph: RoadmapGraph, e: int) -> float:
    return graph.lazy_weight(e)


def evaluate_edge(graph: RoadmapGraph, e: int) -> tuple[EdgeStatus, float]:
    return graph.evaluate_edge(e)


@dataclass(frozen=True)
class PathView:
    """A path split into an evaluated head and a lazy tail.

    ``split_index`` counts the leading edges that have been evaluated free.
    """

    vertices: tuple[int, ...]
    split_index: int

    @property
    def edge_count(self) -> int:
        return max(len(self.vertices) - 1, 0)


def path_costs(graph: RoadmapGraph, path: PathView) -> tuple[float, float, float]:
    """Return ``(evaluated_cost, lazy_tail_cost, estimated_total)``."""
    vs = path.vertices
    if not 0 <= path.split_index <= path.edge_count:
        raise ContractError("split_index outside the path")
    head = 0.0
    tail = 0.0
    for i in range(len(vs) - 1):
        try:
            e = graph.edge_index(vs[i], vs[i + 1])
        except KeyError:
            raise ContractError(f"vertices {vs[i]} and {vs[i + 1]} are not adjacent") from None
        s = graph.status[e]
        if i < path.split_index:
            if s != EdgeStatus.FREE:
                raise ContractError(f"head edge {e} is not evaluated free")
            head += graph.weights[e]
        else:
            if s == EdgeStatus.BLOCKED:
                raise ContractError(f"tail edge {e} is blocked")
            tail += graph.weights[e]
    return head, tail, head + tail


# -- text format ---------------------------------------------------------

def write_graph(graph: RoadmapGraph, dest, *, truth: bool = False) -> None:
    """Write ``graph`` in the line-oriented text format.

    With ``truth=True`` every edge carries its evaluator answer (F/B), so
    the file alone reproduces the instance; otherwise the memoized status
    is written (U for unevaluated edges).
    """
    if truth:
        letters = ["F" if ok else "B" for ok in graph.ground_truth()]
    else:
        letters = [_STATUS_LETTER[EdgeStatus(s)] for s in graph.status]
    out = io.StringIO()
    out.write(f"{graph.dim} {graph.n} {graph.m}\n")
    for v in range(graph.n):
        if graph.coords is None:
            out.write(f"v {v}\n")
        else:
            out.write("v %d %s\n" % (v, " ".join(repr(float(x)) for x in graph.coords[v])))
    for e in range(graph.m):
        out.write(f"e {graph.edge_a[e]} {graph.edge_b[e]} {graph.weights[e]!r} {letters[e]}\n")
    text = out.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def read_graph(src) -> RoadmapGraph:
    """Parse the text format. Status letters seed a table evaluator.

    Edges marked ``U`` (or without a letter) are treated as free.
    """
    if hasattr(src, "read"):
        text = src.read()
    elif isinstance(src, (str, os.PathLike)) and os.path.exists(src):
        with open(src, encoding="ascii") as fh:
            text = fh.read()
    else:
        raise FileNotFoundError(src)
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ContractError("empty graph file")
    try:
        d, n, m = (int(x) for x in lines[0])
    except ValueError:
        raise ContractError("header must be 'd n m'") from None
    body = lines[1:]
    if len(body) != n + m:
        raise ContractError(f"expected {n} vertex and {m} edge lines, got {len(body)} lines")
    coords = np.zeros((n, d)) if d > 0 else None
    for i, parts in enumerate(body[:n]):
        if parts[0] != "v" or int(parts[1]) != i or len(parts) != 2 + d:
            raise ContractError(f"bad vertex line {' '.join(parts)!r}")
        if d > 0:
            coords[i] = [float(x) for x in parts[2:]]
    edges = []
    free = []
    for parts in body[n:]:
        if parts[0] != "e" or len(parts) not in (4, 5):
            raise ContractError(f"bad edge line {' '.join(parts)!r}")
        edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
        letter = parts[4] if len(parts) == 5 else "U"
        if letter not in _LETTER_STATUS:
            raise ContractError(f"unknown status letter {letter!r}")
        free.append(letter != "B")
    return RoadmapGraph(n, edges, coords=coords, evaluator=table_evaluator(free))
