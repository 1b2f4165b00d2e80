"""Lazy Receding-Horizon A* and its benchmark environments."""
from ._accel import BACKEND
from .errors import ConfigError, ConsistencyError, ContractError, GenerationError
from .roadmap import EdgeStatus, PathView, RoadmapGraph, path_costs, read_graph, write_graph
from .search import UNBOUNDED, Heuristic, LRAStar, SearchConfig, SearchResult, TrialStats, search

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "ConsistencyError",
    "ContractError",
    "GenerationError",
    "EdgeStatus",
    "PathView",
    "RoadmapGraph",
    "path_costs",
    "read_graph",
    "write_graph",
    "UNBOUNDED",
    "Heuristic",
    "LRAStar",
    "SearchConfig",
    "SearchResult",
    "TrialStats",
    "search",
]
