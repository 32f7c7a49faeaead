"""Shared oracles and generators for the test suite.

Everything here recomputes results by a route independent of the library
implementation: plain breadth-first search for distances, geodesic
enumeration for convexity, exhaustive orientation filtering for duals.
"""

from __future__ import annotations

import json
import random
from collections import deque

import pytest

from cubeflats.cli import fixture_path
from cubeflats.complexes import CubeComplex
from cubeflats.periodic import PeriodicWallspace
from cubeflats.wallspaces import Wallspace


def load_periodic(name: str) -> PeriodicWallspace:
    with open(fixture_path(name)) as f:
        return PeriodicWallspace.from_json_dict(json.load(f))


def load_json_fixture(name: str):
    with open(fixture_path(name)) as f:
        return json.load(f)


@pytest.fixture
def grid_pw():
    return load_periodic("square_grid.json")


@pytest.fixture
def glide_pw():
    return load_periodic("glide_plane.json")


@pytest.fixture
def halfplane_pw():
    return load_periodic("halfplane.json")


# ---------------------------------------------------------------------------
# independent oracles


def bfs_distance(c: CubeComplex, u: int, v: int) -> int:
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            return dist[x]
        for y, _ in c.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    raise AssertionError("disconnected")


def bfs_distances(c: CubeComplex, source: int):
    dist = [-1] * c.n_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y, _ in c.adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def interval_vertices(c: CubeComplex, u: int, v: int):
    """Vertices on some geodesic from u to v, from BFS distance sums."""
    du = bfs_distances(c, u)
    dv = bfs_distances(c, v)
    d = du[v]
    return {w for w in range(c.n_vertices) if du[w] + dv[w] == d}


def is_convex_oracle(c: CubeComplex, s) -> bool:
    s = set(s)
    return all(interval_vertices(c, u, v) <= s for u in s for v in s)


def hull_oracle(c: CubeComplex, s):
    """Iterate interval closure until stable."""
    current = set(s)
    while True:
        grown = set(current)
        for u in current:
            for v in current:
                grown |= interval_vertices(c, u, v)
        if grown == current:
            return current
        current = grown


def coordinatewise_median(m, n, a, b, c):
    ax, ay = divmod(a, n)
    bx, by = divmod(b, n)
    cx, cy = divmod(c, n)
    mx = sorted((ax, bx, cx))[1]
    my = sorted((ay, by, cy))[1]
    return mx * n + my


def random_wallspace(rng: random.Random, max_points=8, max_walls=12) -> Wallspace:
    n = rng.randrange(3, max_points + 1)
    target = rng.randrange(1, max_walls + 1)
    walls, seen = [], set()
    for _ in range(300):
        if len(walls) >= target:
            break
        side = frozenset(p for p in range(n) if rng.random() < 0.5)
        if not side or len(side) == n:
            continue
        canonical = side if 0 in side else frozenset(range(n)) - side
        if canonical in seen:
            continue
        seen.add(canonical)
        walls.append(sorted(side))
    if not walls:
        walls = [[0]]
    return Wallspace(n, walls)


def random_convex_family(rng: random.Random, c: CubeComplex, max_members=5):
    """Random pairwise-intersecting family of convex vertex sets."""
    for _ in range(40):
        k = rng.randrange(1, max_members + 1)
        family = []
        for _ in range(k):
            size = rng.randrange(1, min(4, c.n_vertices) + 1)
            family.append(c.hull(rng.sample(range(c.n_vertices), size)))
        if all(family[i] & family[j]
               for i in range(k) for j in range(i + 1, k)):
            return family
    root = rng.randrange(c.n_vertices)
    family = []
    for _ in range(rng.randrange(1, max_members + 1)):
        extra = rng.sample(range(c.n_vertices), min(2, c.n_vertices))
        family.append(c.hull([root, *extra]))
    return family
