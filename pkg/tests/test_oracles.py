import math

import pytest

from conftest import A, B, S, T, chain, diamond
from lrastar.corpus import abstract_corpus
from lrastar.errors import ContractError
from lrastar.oracles import (
    dijkstra_full_eval,
    enumerate_paths,
    lazysp_forward,
    segment_box_chord,
    segment_box_intersects,
)
from lrastar.roadmap import EdgeStatus, RoadmapGraph, table_evaluator


def test_dijkstra_on_diamond():
    r = dijkstra_full_eval(diamond(), S, T)
    assert r.path == (S, B, T) and r.cost == pytest.approx(2.4)


def test_dijkstra_fails_when_target_walled_off():
    g = RoadmapGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)],
                     evaluator=table_evaluator([True, False, False]))
    assert not dijkstra_full_eval(g, 0, 2).found


def test_dijkstra_on_chain():
    assert dijkstra_full_eval(chain(2), 0, 2).cost == 2.0


def test_oracles_leave_memoized_state_alone():
    g = diamond()
    dijkstra_full_eval(g, S, T)
    lazysp_forward(g, S, T)
    assert g.eval_count == 0 and all(s == EdgeStatus.UNKNOWN for s in g.status)


def test_lazysp_on_diamond():
    r = lazysp_forward(diamond(), S, T)
    assert r.evaluated_edges == [(S, A), (A, T), (S, B), (B, T)]
    assert r.path == (S, B, T) and r.cost == pytest.approx(2.4)


def test_lazysp_on_free_chain_evaluates_one_path():
    g = RoadmapGraph(4, [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.5), (2, 3, 1.5)])
    r = lazysp_forward(g, 0, 3)
    assert r.evaluated_edges == [(0, 1), (1, 3)]


def test_lazysp_without_lazy_path():
    r = lazysp_forward(RoadmapGraph(3, [(0, 1, 1.0)]), 0, 2)
    assert not r.found and r.evaluated_edges == []


def test_enumerate_small_graphs():
    assert len(enumerate_paths(diamond(), S, T)) == 2
    tri = RoadmapGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    assert sorted(p for p, _, _ in enumerate_paths(tri, 0, 2)) == [(0, 1, 2), (0, 2)]
    assert enumerate_paths(RoadmapGraph(3, [(0, 1, 1.0)]), 0, 2) == []
    with pytest.raises(ContractError):
        enumerate_paths(chain(20), 0, 20)


def test_enumeration_costs():
    paths = {p: (lazy, true) for p, lazy, true in enumerate_paths(diamond(), S, T)}
    assert paths[(S, A, T)] == (2.0, math.inf)
    assert paths[(S, B, T)][1] == pytest.approx(2.4)


def test_oracles_agree_on_tiny_graphs():
    tiny = abstract_corpus(150, base_seed=500, min_vertices=4, max_vertices=9, density=0.45)
    for inst in tiny:
        g, s, t = inst.graph, inst.source, inst.target
        best = min((true for _, _, true in enumerate_paths(g, s, t)), default=math.inf)
        ref = dijkstra_full_eval(g, s, t)
        assert ref.cost == pytest.approx(best) if math.isfinite(best) else not ref.found
        lazy = lazysp_forward(g, s, t)
        assert lazy.cost == pytest.approx(ref.cost) if ref.found else not lazy.found


def test_segment_box_chord():
    lo, hi = (0.4, 0.0), (0.6, 1.0)
    assert segment_box_chord((0.0, 0.5), (1.0, 0.5), lo, hi) == pytest.approx(0.2)
    assert segment_box_chord((0.0, 0.5), (0.3, 0.5), lo, hi) == -1.0
    assert segment_box_intersects((0.5, 0.5), (0.5, 0.5), lo, hi)
    assert segment_box_chord((0.0, 0.0), (0.4, 0.0), lo, hi) == 0.0
