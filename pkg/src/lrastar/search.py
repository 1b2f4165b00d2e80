"""Lazy Receding-Horizon A* (LRA*).

The searcher keeps one tree node per vertex, ``(parent, c, l, b)``: the
evaluated cost of the tree path, the lazy cost of its unevaluated tail and
the number of tail edges (the budget). No node's budget ever exceeds the
lookahead ``alpha``. Four addressable queues drive the search:

* ``frontier`` -- nodes with budget ``alpha`` plus the target node; the
  minimum is selected for evaluation every iteration,
* ``extend``   -- leaves with budget below ``alpha`` that still have to be
  grown,
* ``update``   -- nodes whose entry changed after a free edge was found,
* ``rewire``   -- nodes cut off by a blocked edge.

``frontier`` and ``extend`` are keyed by ``c + l + h``; ``update`` and
``rewire`` by ``c + l``. Ties are broken by the smaller vertex id.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._accel import IndexedHeap, LRACore
from .errors import ConfigError, ContractError
from .roadmap import EdgeStatus, RoadmapGraph

__all__ = [
    "UNBOUNDED",
    "Heuristic",
    "SearchConfig",
    "TrialStats",
    "SearchResult",
    "Outcome",
    "LRAStar",
    "search",
    "frontier_key",
    "parse_alpha",
]

INF = math.inf
UNBOUNDED = INF
_TARGET_CODE = 0
_NO_BUDGET = 1 << 62

_FREE = int(EdgeStatus.FREE)
_UNKNOWN = int(EdgeStatus.UNKNOWN)


def parse_alpha(value) -> float | int:
    """Parse a lookahead value; ``inf``/``None`` mean unbounded."""
    if value is None:
        return UNBOUNDED
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "infinity", "unbounded", "∞"):
            return UNBOUNDED
        value = int(v)
    if isinstance(value, float) and math.isinf(value) and value > 0:
        return UNBOUNDED
    if int(value) != value or value < 1:
        raise ConfigError(f"alpha must be a positive integer or inf, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Heuristic:
    """Admissible cost-to-go estimate.

    ``kind`` is one of ``zero``, ``euclid``, ``scaled`` (Euclidean times
    ``factor`` in (0, 1]) or ``custom`` (``fn(graph, vertex, target)``).
    """

    kind: str = "zero"
    factor: float = 1.0
    fn: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("zero", "euclid", "scaled", "custom"):
            raise ConfigError(f"unknown heuristic kind {self.kind!r}")
        if self.kind == "scaled" and not (0.0 < self.factor <= 1.0):
            raise ConfigError("scaled heuristic factor must lie in (0, 1]")
        if self.kind == "custom" and self.fn is None:
            raise ConfigError("custom heuristic needs fn")

    @classmethod
    def parse(cls, spec) -> "Heuristic":
        if isinstance(spec, Heuristic):
            return spec
        if callable(spec):
            return cls("custom", fn=spec)
        s = str(spec).strip().lower()
        if s in ("zero", "none", "0"):
            return cls("zero")
        if s in ("euclid", "euclidean"):
            return cls("euclid")
        if s.startswith("scaled:"):
            return cls("scaled", factor=float(s.split(":", 1)[1]))
        raise ConfigError(f"cannot parse heuristic {spec!r}")

    def values(self, graph: RoadmapGraph, target: int) -> list[float]:
        """Heuristic value for every vertex; zero when no geometry exists."""
        if self.kind == "zero":
            return [0.0] * graph.n
        if self.kind == "custom":
            return [float(self.fn(graph, v, target)) for v in range(graph.n)]
        if graph.coords is None:
            return [0.0] * graph.n
        d = np.linalg.norm(graph.coords - graph.coords[target], axis=1)
        if self.kind == "scaled":
            d = d * self.factor
        return d.tolist()

    def __str__(self):
        if self.kind == "scaled":
            return f"scaled:{self.factor!r}"
        return self.kind


@dataclass(frozen=True)
class SearchConfig:
    alpha: float | int = UNBOUNDED
    beta: int = 1
    heuristic: Heuristic = field(default_factory=Heuristic)
    lazy_band_extension: bool = True
    check_invariants: bool = False
    engine: str = "auto"

    def __post_init__(self):
        if self.engine not in ("auto", "python", "compiled"):
            raise ConfigError(f"engine must be auto, python or compiled, got {self.engine!r}")
        if self.engine == "compiled" and LRACore is None:
            raise ConfigError("compiled engine requested but the extension is not built")
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))
        object.__setattr__(self, "heuristic", Heuristic.parse(self.heuristic))
        if int(self.beta) != self.beta or self.beta < 1:
            raise ConfigError(f"beta must be a positive integer, got {self.beta!r}")
        if self.beta > self.alpha:
            raise ConfigError(f"beta={self.beta} exceeds alpha={self.alpha}")

    @property
    def alpha_label(self) -> str:
        return "inf" if self.alpha == UNBOUNDED else str(self.alpha)


@dataclass
class TrialStats:
    evaluated_edges: list = field(default_factory=list)
    evaluation_results: list = field(default_factory=list)
    blocked_count: int = 0
    rewired_node_count: int = 0
    node_update_count: int = 0
    queue_op_count: int = 0
    iterations: int = 0
    popped_f_trace: list = field(default_factory=list)
    eval_time: float = 0.0
    rewire_time: float = 0.0
    graph_op_time: float = 0.0
    total_time: float = 0.0
    result_cost: float = INF
    replay: Optional[list] = None

    @property
    def edge_evaluations(self) -> int:
        return len(self.evaluated_edges)

    @property
    def evaluated_edge_set(self) -> frozenset:
        return frozenset(self.evaluated_edges)


@dataclass
class SearchResult:
    path: Optional[tuple]
    cost: float
    stats: TrialStats

    @property
    def found(self) -> bool:
        return self.path is not None


class Outcome(enum.Enum):
    TARGET_REACHED = "target"
    EDGE_FREE = "free"
    EDGE_BLOCKED = "blocked"
    EXHAUSTED = "exhausted"


def frontier_key(c: float, l: float, h: float) -> float:
    """Key of a node in the frontier and extend queues."""
    return (c + l) + h


class LRAStar:
    """One LRA* run over ``graph``; call :meth:`run` once.

    The graph's memoized evaluation state is shared and mutated; hand each
    run a fresh :meth:`RoadmapGraph.copy` when comparing configurations.
    """

    def __init__(self, graph: RoadmapGraph, source: int, target: int,
                 config: SearchConfig = SearchConfig(), replay: bool = False):
        n = graph.n
        if not (0 <= source < n and 0 <= target < n):
            raise ContractError("source/target out of range")
        self.graph = graph
        self.source = source
        self.target = target
        self.config = config
        self.alpha = n if config.alpha == UNBOUNDED else min(int(config.alpha), max(n, 1))
        self.beta = min(config.beta, self.alpha)
        self.h = config.heuristic.values(graph, target)

        self.c = [INF] * n
        self.l = [INF] * n
        self.b = [_NO_BUDGET] * n
        self.parent = [-1] * n
        self.pedge = [-1] * n
        self.in_tree = [False] * n
        self.children: list[set] = [set() for _ in range(n)]

        self.q_frontier = IndexedHeap(n)
        self.q_extend = IndexedHeap(n)
        self.q_update = IndexedHeap(n)
        self.q_rewire = IndexedHeap(n)
        self.t_rewire: list[int] = []

        self.stats = TrialStats(replay=[] if replay else None)
        self._updates_this_iter = 0

    # -- node bookkeeping ------------------------------------------------

    def _set(self, v, p, e, c, l, b):
        if b > self.alpha:
            raise AssertionError(f"budget invariant violated at vertex {v}: b={b} > alpha={self.alpha}")
        self.parent[v] = p
        self.pedge[v] = e
        self.c[v] = c
        self.l[v] = l
        self.b[v] = b
        self.stats.node_update_count += 1

    def _reset(self, v):
        self.parent[v] = -1
        self.pedge[v] = -1
        self.c[v] = INF
        self.l[v] = INF
        self.b[v] = _NO_BUDGET

    def _attach(self, v):
        self.in_tree[v] = True
        p = self.parent[v]
        if p >= 0:
            self.children[p].add(v)

    def _detach(self, v):
        self.in_tree[v] = False
        p = self.parent[v]
        if p >= 0:
            self.children[p].discard(v)

    def _subtree(self, v) -> list[int]:
        out = [v]
        stack = [v]
        children = self.children
        while stack:
            u = stack.pop()
            for k in children[u]:
                out.append(k)
                stack.append(k)
        return out

    def fkey(self, v) -> float:
        return (self.c[v] + self.l[v]) + self.h[v]

    def gkey(self, v) -> float:
        return self.c[v] + self.l[v]

    def path_to(self, v) -> tuple:
        out = []
        while v >= 0:
            out.append(v)
            v = self.parent[v]
        return tuple(reversed(out))

    def _log(self, line):
        if self.stats.replay is not None:
            self.stats.replay.append(line)

    # -- main loop -------------------------------------------------------

    def run(self) -> SearchResult:
        stats = self.stats
        graph = self.graph
        t_start = time.perf_counter()
        eval_t0 = graph.eval_time
        try:
            if self.source == self.target:
                stats.result_cost = 0.0
                return SearchResult((self.source,), 0.0, stats)
            self.start()
            while True:
                if self.config.check_invariants:
                    self.check_invariants()
                outcome = self.select_and_evaluate()
                if outcome is Outcome.EXHAUSTED:
                    return SearchResult(None, INF, stats)
                if outcome is Outcome.TARGET_REACHED:
                    cost = self.c[self.target]
                    stats.result_cost = cost
                    return SearchResult(self.path_to(self.target), cost, stats)
                self.update_alpha_band()
                t0 = time.perf_counter()
                self.rewire_alpha_band()
                stats.rewire_time += time.perf_counter() - t0
                self.extend_alpha_band()
        finally:
            stats.total_time = time.perf_counter() - t_start
            stats.eval_time = graph.eval_time - eval_t0
            stats.graph_op_time = stats.total_time - stats.eval_time

    def start(self) -> None:
        """Root the tree at the source and grow the first band."""
        s = self.source
        self._set(s, -1, -1, 0.0, 0.0, 0)
        self._attach(s)
        self.q_extend.push(s, self.fkey(s))
        self.stats.queue_op_count += 1
        self.extend_alpha_band()

    def select_and_evaluate(self) -> Outcome:
        """Pop the best frontier node and evaluate up to beta tail edges."""
        stats = self.stats
        if not self.q_frontier:
            return Outcome.EXHAUSTED
        tau, f = self.q_frontier.pop()
        stats.queue_op_count += 1
        stats.iterations += 1
        stats.popped_f_trace.append(f)
        self._log(f"POP {tau} {f!r}")

        chain = [tau]
        b, parent = self.b, self.parent
        v = tau
        while b[v] > 0:
            v = parent[v]
            chain.append(v)
        chain.reverse()

        graph = self.graph
        outcome = Outcome.EDGE_FREE
        for i in range(min(self.beta, len(chain) - 1)):
            u, v = chain[i], chain[i + 1]
            e = self.pedge[v]
            if self.config.check_invariants and graph.status[e] != _UNKNOWN:
                raise AssertionError(f"tail edge {e} already evaluated")
            status, w = graph.evaluate_edge(e)
            a, bb = (u, v) if u < v else (v, u)
            stats.evaluated_edges.append((a, bb))
            free = status == EdgeStatus.FREE
            stats.evaluation_results.append(free)
            self._log(f"EVAL {a} {bb} {'F' if free else 'B'}")
            if free:
                self._set(v, u, e, self.c[u] + w, 0.0, 0)
                self.q_update.push(v, self.gkey(v))
                stats.queue_op_count += 1
                if v == self.target:
                    return Outcome.TARGET_REACHED
            else:
                stats.blocked_count += 1
                self.t_rewire = self._subtree(v)
                self._detach(v)
                return Outcome.EDGE_BLOCKED
        return outcome

    def update_alpha_band(self) -> None:
        """Cascade entry changes parent-before-child through updated subtrees."""
        stats = self.stats
        q_update, q_frontier, q_extend = self.q_update, self.q_frontier, self.q_extend
        c, l, b, children, pedge = self.c, self.l, self.b, self.children, self.pedge
        status, weights = self.graph.status, self.graph.weights
        alpha = self.alpha
        count = 0
        while q_update:
            tau, _ = q_update.pop()
            stats.queue_op_count += 1
            count += 1
            kids = children[tau]
            if not kids:
                q_extend.push(tau, self.fkey(tau))
                stats.queue_op_count += 1
                continue
            for k in kids:
                if b[k] == alpha:
                    q_frontier.remove(k)
                    stats.queue_op_count += 1
                e = pedge[k]
                if b[tau] == 0 and status[e] == _FREE:
                    self._set(k, tau, e, c[tau] + weights[e], 0.0, 0)
                else:
                    self._set(k, tau, e, c[tau], l[tau] + weights[e], b[tau] + 1)
                q_update.push(k, self.gkey(k))
                stats.queue_op_count += 1
        if count:
            self._log(f"UPDATE {count}")

    def rewire_alpha_band(self) -> None:
        """Re-parent the subtree cut off by a blocked edge."""
        t_rewire = self.t_rewire
        if not t_rewire:
            return
        stats = self.stats
        self.t_rewire = []
        alpha, target = self.alpha, self.target
        c, l, b = self.c, self.l, self.b
        in_tree, children = self.in_tree, self.children
        q_frontier, q_extend, q_rewire = self.q_frontier, self.q_extend, self.q_rewire
        graph = self.graph
        weights = graph.weights

        members = set(t_rewire)
        for t in t_rewire:
            in_tree[t] = False
            children[t].clear()
            self._reset(t)
            if q_frontier.remove(t):
                stats.queue_op_count += 1
            if q_extend.remove(t):
                stats.queue_op_count += 1
        for t in t_rewire:
            best = INF
            for u, e in graph.neighbors(t):
                if (not in_tree[u] or b[u] >= alpha or u == target
                        or u in members or u in q_extend):
                    continue
                lu = l[u] + weights[e]
                cand = c[u] + lu
                if cand < best:
                    best = cand
                    self._set(t, u, e, c[u], lu, b[u] + 1)
            q_rewire.push(t, self.gkey(t))
            stats.queue_op_count += 1
        stats.rewired_node_count += len(t_rewire)
        self._log(f"REWIRE {len(t_rewire)}")

        parent = self.parent
        while q_rewire:
            t, _ = q_rewire.pop()
            stats.queue_op_count += 1
            if parent[t] < 0:
                continue
            self._attach(t)
            if b[t] == alpha or t == target:
                q_frontier.push(t, self.fkey(t))
                stats.queue_op_count += 1
                continue
            q_extend.push(t, self.fkey(t))
            stats.queue_op_count += 1
            ct, lt, bt = c[t], l[t], b[t]
            for v, e in graph.neighbors(t):
                if v not in q_rewire:
                    continue
                lv = lt + weights[e]
                if ct + lv < c[v] + l[v]:
                    self._set(v, t, e, ct, lv, bt + 1)
                    q_rewire.push(v, self.gkey(v))
                    stats.queue_op_count += 1

    def extend_alpha_band(self) -> None:
        """Grow leaves with spare budget until they reach the frontier."""
        stats = self.stats
        alpha, target = self.alpha, self.target
        c, l, b, h = self.c, self.l, self.b, self.h
        in_tree = self.in_tree
        q_frontier, q_extend = self.q_frontier, self.q_extend
        graph = self.graph
        weights = graph.weights
        lazy = self.config.lazy_band_extension
        while q_extend:
            if lazy and q_frontier and q_extend.peek_key() >= q_frontier.peek_key():
                break
            t, _ = q_extend.pop()
            stats.queue_op_count += 1
            if t == target:
                q_frontier.push(t, self.fkey(t))
                stats.queue_op_count += 1
                continue
            ct, lt, bt = c[t], l[t], b[t]
            for v, e in graph.neighbors(t):
                lv = lt + weights[e]
                if ct + lv >= c[v] + l[v]:
                    continue
                if in_tree[v]:
                    sub = self._subtree(v)
                    self._detach(v)
                    for s in sub:
                        in_tree[s] = False
                        self.children[s].clear()
                        if q_frontier.remove(s):
                            stats.queue_op_count += 1
                        if q_extend.remove(s):
                            stats.queue_op_count += 1
                        if s != v:
                            self._reset(s)
                self._set(v, t, e, ct, lv, bt + 1)
                self._attach(v)
                key = (ct + lv) + h[v]
                if bt + 1 == alpha:
                    q_frontier.push(v, key)
                else:
                    q_extend.push(v, key)
                stats.queue_op_count += 1

    # -- instrumentation -------------------------------------------------

    def check_invariants(self) -> None:
        """Full consistency sweep; raises AssertionError on any violation."""
        graph = self.graph
        alpha = self.alpha
        for v in range(graph.n):
            for q in (self.q_frontier, self.q_extend):
                if v in q and not self.in_tree[v]:
                    raise AssertionError(f"queued vertex {v} is not in the tree")
            if not self.in_tree[v]:
                if self.c[v] != INF and v not in self.q_update:
                    raise AssertionError(f"vertex {v} out of tree with finite cost")
                continue
            b = self.b[v]
            if b > alpha:
                raise AssertionError(f"budget {b} > alpha at {v}")
            if (b == 0) != (self.l[v] == 0.0):
                raise AssertionError(f"budget/lazy-cost mismatch at {v}")
            p = self.parent[v]
            if v == self.source:
                continue
            if p < 0 or not self.in_tree[p] or v not in self.children[p]:
                raise AssertionError(f"broken parent link at {v}")
            if v == self.target and self.children[v]:
                raise AssertionError("target node has children")
            e = self.pedge[v]
            if b > 0:
                if graph.status[e] != _UNKNOWN:
                    raise AssertionError(f"lazy tree edge {e} is evaluated")
                if b != self.b[p] + 1 or self.c[v] != self.c[p]:
                    raise AssertionError(f"lazy child entry inconsistent at {v}")
            elif graph.status[e] != _FREE:
                raise AssertionError(f"evaluated tree edge {e} is not free")
            if b == alpha and v != self.target and v not in self.q_frontier:
                raise AssertionError(f"frontier node {v} missing from frontier queue")
        for v in self.q_frontier.items():
            if self.b[v] != alpha and v != self.target:
                raise AssertionError(f"non-frontier node {v} in frontier queue")
        if not self.config.lazy_band_extension and self.q_extend:
            raise AssertionError("extend queue not drained")


def _csr(graph: RoadmapGraph):
    """Flat adjacency arrays, cached on the (shared) adjacency lists."""
    cached = getattr(graph, "_csr_cache", None)
    if cached is not None and cached[0] is graph.adj_v:
        return cached[1]
    deg = np.fromiter((len(a) for a in graph.adj_v), dtype=np.intp, count=graph.n)
    ptr = np.zeros(graph.n + 1, dtype=np.intp)
    np.cumsum(deg, out=ptr[1:])
    total = int(ptr[-1])
    adj_v = np.fromiter((v for a in graph.adj_v for v in a), dtype=np.intp, count=total)
    adj_e = np.fromiter((e for a in graph.adj_e for e in a), dtype=np.intp, count=total)
    csr = (ptr, adj_v, adj_e)
    graph._csr_cache = (graph.adj_v, csr)
    return csr


def _run_compiled(graph: RoadmapGraph, source: int, target: int,
                  config: SearchConfig, replay: bool) -> SearchResult:
    n = graph.n
    if not (0 <= source < n and 0 <= target < n):
        raise ContractError("source/target out of range")
    alpha = n if config.alpha == UNBOUNDED else min(int(config.alpha), max(n, 1))
    beta = min(config.beta, alpha)
    stats = TrialStats(replay=[] if replay else None)
    t_start = time.perf_counter()
    eval_t0 = graph.eval_time
    core = None
    try:
        if source == target:
            stats.result_cost = 0.0
            return SearchResult((source,), 0.0, stats)
        h = config.heuristic.values(graph, target)
        core = LRACore(graph, source, target, alpha, beta, config.lazy_band_extension,
                       h, _csr(graph), stats.replay)
        outcome = core.run()
        if outcome == _TARGET_CODE:
            cost = core.cost(target)
            stats.result_cost = cost
            return SearchResult(core.path_to(target), cost, stats)
        return SearchResult(None, INF, stats)
    finally:
        if core is not None:
            stats.evaluated_edges = core.evaluated
            stats.evaluation_results = core.results
            stats.popped_f_trace = core.ftrace
            stats.blocked_count = core.blocked
            stats.rewired_node_count = core.rewired
            stats.node_update_count = core.updates
            stats.queue_op_count = core.queue_ops
            stats.iterations = core.iterations
            stats.rewire_time = core.rewire_time
        stats.total_time = time.perf_counter() - t_start
        stats.eval_time = graph.eval_time - eval_t0
        stats.graph_op_time = stats.total_time - stats.eval_time


def search(graph: RoadmapGraph, source: int, target: int,
           config: SearchConfig = SearchConfig(), replay: bool = False) -> SearchResult:
    """Run LRA* from ``source`` to ``target``.

    ``config.engine`` picks the implementation: ``python`` is the reference
    :class:`LRAStar`; ``compiled`` is the array port in the extension; ``auto``
    uses the compiled one when built, except when the full invariant sweep is
    requested (the compiled core checks only the budget bound).
    """
    use_compiled = config.engine == "compiled" or (
        config.engine == "auto" and LRACore is not None and not config.check_invariants)
    if use_compiled:
        return _run_compiled(graph, source, target, config, replay)
    return LRAStar(graph, source, target, config, replay=replay).run()
