"""Geometric benchmark worlds in the unit hypercube.

Obstacles are closed axis-aligned boxes. Edge validity is decided by
sampling the straight segment at arc-length steps no larger than the
environment's collision resolution (both endpoints included).
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ._accel import segment_hits_boxes
from .errors import ContractError, GenerationError
from .roadmap import RoadmapGraph

__all__ = [
    "BoxObstacle",
    "GeometricEnvironment",
    "RoadmapSpec",
    "first_primes",
    "radical_inverse",
    "halton_point",
    "halton_points",
    "default_radius",
    "build_roadmap",
    "segment_in_collision",
    "make_clutter_env_2d",
    "make_recursive_maze",
    "read_environment",
    "write_environment",
]


@dataclass(frozen=True)
class BoxObstacle:
    min_corner: tuple
    max_corner: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in self.min_corner)
        hi = tuple(float(x) for x in self.max_corner)
        if len(lo) != len(hi):
            raise ContractError("box corners differ in dimension")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ContractError(f"degenerate box {lo} .. {hi}")
        if any(a < 0.0 for a in lo) or any(b > 1.0 for b in hi):
            raise ContractError(f"box {lo} .. {hi} leaves the unit hypercube")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def contains(self, point) -> bool:
        return all(a <= x <= b for a, x, b in zip(self.min_corner, point, self.max_corner))

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.max_corner, self.min_corner)))


@dataclass
class GeometricEnvironment:
    dimension: int
    obstacles: list = field(default_factory=list)
    collision_resolution: float = 1e-3

    def __post_init__(self):
        if self.dimension < 2:
            raise ContractError("environments need dimension >= 2")
        if not self.collision_resolution > 0:
            raise ContractError("collision resolution must be positive")
        for box in self.obstacles:
            if len(box.min_corner) != self.dimension:
                raise ContractError("obstacle dimension mismatch")
        self._refresh()

    def _refresh(self):
        d = self.dimension
        self._lo = np.array([b.min_corner for b in self.obstacles], dtype=float).reshape(-1, d)
        self._hi = np.array([b.max_corner for b in self.obstacles], dtype=float).reshape(-1, d)

    def add(self, box: BoxObstacle) -> None:
        self.obstacles.append(box)
        self._refresh()

    @property
    def bounds(self):
        return self._lo, self._hi

    def point_in_collision(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if not len(self.obstacles):
            return False
        return bool(np.any(np.all((self._lo <= x) & (x <= self._hi), axis=1)))

    def coverage(self, samples: int = 100_000, seed: int = 0) -> float:
        """Monte-Carlo estimate of the occupied volume fraction."""
        pts = np.random.default_rng(seed).random((samples, self.dimension))
        return float(_covered_mask(pts, self._lo, self._hi).mean())


def _covered_mask(pts, lo, hi):
    mask = np.zeros(len(pts), dtype=bool)
    for a, b in zip(lo, hi):
        mask |= np.all((pts >= a) & (pts <= b), axis=1)
    return mask


def segment_in_collision(env: GeometricEnvironment, p, q) -> bool:
    """True iff a resolution-spaced sample of segment ``pq`` hits an obstacle."""
    if not env.obstacles:
        return False
    lo, hi = env.bounds
    return bool(segment_hits_boxes(p, q, lo, hi, env.collision_resolution))


# -- Halton sampling -----------------------------------------------------

def first_primes(k: int) -> list[int]:
    primes = []
    c = 2
    while len(primes) < k:
        if all(c % p for p in primes if p * p <= c):
            primes.append(c)
        c += 1
    return primes


def radical_inverse(index: int, base: int) -> float:
    """Van der Corput radical inverse of ``index`` in ``base``."""
    result = 0.0
    f = 1.0 / base
    i = index
    while i > 0:
        i, digit = divmod(i, base)
        result += digit * f
        f /= base
    return result


def halton_point(index: int, dimension: int, offsets: Optional[Sequence[float]] = None) -> tuple:
    """Point ``index`` (>= 1) of the Halton sequence, shifted modulo 1."""
    if index < 1:
        raise ContractError("Halton index must be >= 1")
    if offsets is None:
        offsets = [0.0] * dimension
    bases = first_primes(dimension)
    return tuple((radical_inverse(index, p) + o) % 1.0 for p, o in zip(bases, offsets))


def halton_points(count: int, dimension: int, offsets=None, start: int = 1) -> np.ndarray:
    if offsets is None:
        offsets = [0.0] * dimension
    bases = first_primes(dimension)
    out = np.empty((count, dimension))
    for k, (p, o) in enumerate(zip(bases, offsets)):
        out[:, k] = [(radical_inverse(i, p) + o) % 1.0 for i in range(start, start + count)]
    return out


# -- roadmaps ------------------------------------------------------------

def default_radius(n: int, dimension: int, free_fraction: float = 1.0) -> float:
    """Connection radius ``gamma * (log n / n) ** (1/d)``, capped at sqrt(d)."""
    d = dimension
    n = max(n, 2)
    gamma = 2.0 * (1.0 + 1.0 / d) ** (1.0 / d) * free_fraction ** (1.0 / d)
    return min(gamma * (math.log(n) / n) ** (1.0 / d), math.sqrt(d))


@dataclass(frozen=True)
class RoadmapSpec:
    dimension: int = 2
    vertex_count: int = 500
    connection_radius: Optional[float] = None
    seed: int = 0
    source: Optional[tuple] = None
    target: Optional[tuple] = None

    def __post_init__(self):
        d = self.dimension
        if self.vertex_count < 0:
            raise ContractError("vertex_count must be non-negative")
        if self.source is None:
            object.__setattr__(self, "source", (0.1,) * d)
        if self.target is None:
            object.__setattr__(self, "target", (0.9,) * d)
        if self.connection_radius is None:
            object.__setattr__(self, "connection_radius", default_radius(self.vertex_count + 2, d))
        r = self.connection_radius
        if not (0.0 < r):
            raise ContractError("connection radius must be positive")
        if len(self.source) != d or len(self.target) != d:
            raise ContractError("source/target dimension mismatch")


SOURCE_ID = 0
TARGET_ID = 1


def roadmap_vertices(spec: RoadmapSpec) -> np.ndarray:
    """Source, target, then ``vertex_count`` offset Halton points."""
    rng = np.random.default_rng(spec.seed)
    offsets = rng.random(spec.dimension)
    pts = halton_points(spec.vertex_count, spec.dimension, offsets)
    return np.vstack([np.asarray(spec.source, float), np.asarray(spec.target, float), pts])


def build_roadmap(spec: RoadmapSpec, env: GeometricEnvironment) -> RoadmapGraph:
    """Halton roadmap; vertex 0 is the source and vertex 1 the target.

    Every pair closer than the connection radius gets an edge whose lazy
    weight is the Euclidean distance. Vertices are not filtered against
    obstacles: an invalid vertex just has all its edges blocked.
    """
    if env.dimension != spec.dimension:
        raise ContractError("environment and roadmap dimensions differ")
    coords = roadmap_vertices(spec)
    r = spec.connection_radius
    pairs = cKDTree(coords).query_pairs(r, output_type="ndarray")
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))] if len(pairs) else pairs.reshape(0, 2)
    dist = np.linalg.norm(coords[pairs[:, 0]] - coords[pairs[:, 1]], axis=1) if len(pairs) else np.zeros(0)
    keep = (dist < r) & (dist > 0.0)
    pairs, dist = pairs[keep], dist[keep]
    edges = [(int(a), int(b), float(w)) for (a, b), w in zip(pairs, dist)]

    lo, hi = env.bounds
    res = env.collision_resolution
    has_obstacles = len(env.obstacles) > 0

    def evaluator(e, _a=pairs[:, 0], _b=pairs[:, 1]):
        if not has_obstacles:
            return True
        return not segment_hits_boxes(coords[_a[e]], coords[_b[e]], lo, hi, res)

    return RoadmapGraph(len(coords), edges, coords=coords, evaluator=evaluator)


# -- generators ----------------------------------------------------------

def make_clutter_env_2d(
    seed: int,
    target_coverage: float = 0.7,
    keep_free: Sequence = ((0.1, 0.1), (0.9, 0.9)),
    side_range: tuple = (0.02, 0.15),
    mc_samples: int = 100_000,
    max_boxes: int = 20_000,
    collision_resolution: float = 1e-3,
    corridor: Optional[float] = 0.04,
) -> GeometricEnvironment:
    """Random axis-aligned boxes until the estimated coverage is reached.

    Box sides are uniform in ``side_range``; boxes containing any
    ``keep_free`` point are rejected. Coverage is estimated on a fixed set
    of ``mc_samples`` uniform points.

    With ``corridor`` set, a box is also rejected when it would cut every
    4-connected chain of fully free grid cells of that size linking the
    first two ``keep_free`` points, so the world stays solvable.
    """
    if not 0.0 <= target_coverage <= 0.95:
        raise ContractError("target_coverage must lie in [0, 0.95]")
    env = GeometricEnvironment(2, [], collision_resolution)
    if target_coverage == 0.0:
        return env
    rng = np.random.default_rng(seed)
    probe = np.random.default_rng([seed, 0x5EED]).random((mc_samples, 2))
    covered = np.zeros(mc_samples, dtype=bool)
    keep = np.asarray(keep_free, dtype=float).reshape(-1, 2)
    s_lo, s_hi = side_range
    grid = _CorridorGrid(corridor, keep[0], keep[1]) if corridor and len(keep) >= 2 else None
    boxes = []
    for _ in range(max_boxes):
        size = rng.uniform(s_lo, s_hi, 2)
        corner = rng.uniform(0.0, 1.0 - size)
        lo, hi = corner, corner + size
        if np.any(np.all((keep >= lo) & (keep <= hi), axis=1)):
            continue
        if grid is not None and not grid.try_block(lo, hi):
            continue
        boxes.append(BoxObstacle(tuple(lo), tuple(hi)))
        covered |= np.all((probe >= lo) & (probe <= hi), axis=1)
        if covered.mean() >= target_coverage:
            env.obstacles = boxes
            env._refresh()
            return env
    raise GenerationError(f"coverage {target_coverage} not reached within {max_boxes} boxes")


class _CorridorGrid:
    """Coarse occupancy grid that refuses boxes disconnecting two cells."""

    def __init__(self, cell, a, b):
        self.k = max(int(round(1.0 / cell)), 2)
        self.blocked = np.zeros((self.k, self.k), dtype=bool)
        self.a = self._cell(a)
        self.b = self._cell(b)

    def _cell(self, p):
        return tuple(min(int(x * self.k), self.k - 1) for x in p)

    def _span(self, lo, hi):
        i0 = max(int(np.floor(lo[0] * self.k)), 0)
        i1 = min(int(np.floor(hi[0] * self.k)), self.k - 1)
        j0 = max(int(np.floor(lo[1] * self.k)), 0)
        j1 = min(int(np.floor(hi[1] * self.k)), self.k - 1)
        return slice(i0, i1 + 1), slice(j0, j1 + 1)

    def try_block(self, lo, hi) -> bool:
        si, sj = self._span(lo, hi)
        trial = self.blocked.copy()
        trial[si, sj] = True
        labels, _ = ndimage.label(~trial)
        la, lb = labels[self.a], labels[self.b]
        if la == 0 or la != lb:
            return False
        self.blocked = trial
        return True


def make_recursive_maze(
    dimension: int,
    depth: int,
    wall_thickness: float = 0.01,
    gap_fraction: float = 0.2,
    collision_resolution: float = 1e-3,
) -> GeometricEnvironment:
    """Recursive-division maze in the unit hypercube.

    Each level splits the current cell at its midpoint with a wall
    perpendicular to axis ``level % d``. The wall leaves one gap of
    ``gap_fraction`` of the cell width along the next axis, at the low end
    for even-numbered walls and the high end for odd ones, and spans the
    cell fully along all other axes. A wall is a single box; depth ``k``
    yields ``2**k - 1`` walls.
    """
    d = dimension
    if d < 2:
        raise ContractError("maze dimension must be >= 2")
    if depth < 1:
        raise ContractError("maze depth must be >= 1")
    if not 0.0 < gap_fraction < 0.25:
        raise ContractError("gap_fraction must lie in (0, 0.25)")
    # Smallest cell edge touched by a gap, and the sub-wall offset inside it.
    levels_per_axis = math.ceil(depth / d)
    smallest = 0.5 ** levels_per_axis
    margin = smallest * (0.25 - gap_fraction)
    if wall_thickness <= 0 or wall_thickness / 2 >= margin:
        raise GenerationError(
            f"wall thickness {wall_thickness} leaves no corridor at depth {depth} in {d}D"
        )
    env = GeometricEnvironment(d, [], collision_resolution)
    counter = [0]

    def divide(lo, hi, level):
        if level >= depth:
            return
        axis = level % d
        gap_axis = (axis + 1) % d
        mid = 0.5 * (lo[axis] + hi[axis])
        wlo = list(lo)
        whi = list(hi)
        wlo[axis] = mid - wall_thickness / 2
        whi[axis] = mid + wall_thickness / 2
        width = hi[gap_axis] - lo[gap_axis]
        if counter[0] % 2 == 0:
            wlo[gap_axis] = lo[gap_axis] + gap_fraction * width
        else:
            whi[gap_axis] = hi[gap_axis] - gap_fraction * width
        counter[0] += 1
        env.obstacles.append(BoxObstacle(tuple(wlo), tuple(whi)))
        left_hi = list(hi)
        left_hi[axis] = mid
        right_lo = list(lo)
        right_lo[axis] = mid
        divide(lo, left_hi, level + 1)
        divide(right_lo, hi, level + 1)

    divide([0.0] * d, [1.0] * d, 0)
    env._refresh()
    return env


# -- text format ---------------------------------------------------------

def write_environment(env: GeometricEnvironment, dest) -> None:
    out = io.StringIO()
    out.write(f"dim {env.dimension}\n")
    out.write(f"res {env.collision_resolution!r}\n")
    for box in env.obstacles:
        vals = list(box.min_corner) + list(box.max_corner)
        out.write("box " + " ".join(repr(float(v)) for v in vals) + "\n")
    text = out.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def read_environment(src) -> GeometricEnvironment:
    if hasattr(src, "read"):
        text = src.read()
    else:
        with open(os.fspath(src), encoding="ascii") as fh:
            text = fh.read()
    dim = None
    res = 1e-3
    boxes = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "dim":
            dim = int(parts[1])
        elif parts[0] == "res":
            res = float(parts[1])
        elif parts[0] == "box":
            if dim is None:
                raise ContractError("'box' before 'dim'")
            vals = [float(x) for x in parts[1:]]
            if len(vals) != 2 * dim:
                raise ContractError(f"box line needs {2 * dim} numbers")
            boxes.append(BoxObstacle(tuple(vals[:dim]), tuple(vals[dim:])))
        else:
            raise ContractError(f"unknown environment line {line!r}")
    if dim is None:
        raise ContractError("missing 'dim' line")
    return GeometricEnvironment(dim, boxes, res)
