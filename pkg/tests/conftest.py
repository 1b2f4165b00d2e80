import pytest

from lrastar.roadmap import RoadmapGraph, table_evaluator

S, A, B, T = 0, 1, 2, 3


def diamond(a_t_free=False):
    """s-a (1.0), a-t (1.0), s-b (1.2), b-t (1.2); only a-t may be blocked."""
    edges = [(S, A, 1.0), (A, T, 1.0), (S, B, 1.2), (B, T, 1.2)]
    free = [True, a_t_free, True, True]
    return RoadmapGraph(4, edges, evaluator=table_evaluator(free))


def chain(k, free=None, w=1.0):
    """Path graph 0 - 1 - ... - k with unit lazy weights."""
    edges = [(i, i + 1, w) for i in range(k)]
    free = [True] * k if free is None else free
    return RoadmapGraph(k + 1, edges, evaluator=table_evaluator(free))


@pytest.fixture
def diamond_blocked():
    return diamond(a_t_free=False)


@pytest.fixture
def diamond_free():
    return diamond(a_t_free=True)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (isinstance(k, str), k)):
        terminalreporter.write_line(lines[key])
