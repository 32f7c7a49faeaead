"""Finite wallspaces and their dual cube complexes.

A wallspace is a finite point set with a family of bipartitions (walls).  Its
dual cube complex has one vertex per consistent orientation — a choice of
side for every wall such that any two chosen sides share a point — and an
edge between orientations differing on a single wall.  Orientations induced
by points ("canonical" orientations) seed a breadth-first flip search, which
keeps the construction polynomial in the size of the output instead of
enumerating all 2^walls side choices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .complexes import CubeComplex

__all__ = [
    "Wallspace",
    "WallspaceError",
    "canonical_orientation",
    "dual",
    "dual_with_orientations",
    "grid_wallspace",
]


class WallspaceError(ValueError):
    """Invalid wallspace data (empty side, duplicate wall, bad point id)."""


@dataclass(frozen=True)
class Wallspace:
    """Points ``0 .. n_points-1`` and walls given by their left sides."""

    n_points: int
    walls: tuple

    def __init__(self, n_points: int, walls: Iterable[Iterable[int]]):
        if n_points < 1:
            raise WallspaceError("a wallspace needs at least one point")
        norm = []
        seen = set()
        for i, w in enumerate(walls):
            side = frozenset(int(p) for p in w)
            if not all(0 <= p < n_points for p in side):
                raise WallspaceError(f"wall {i} mentions an unknown point")
            if not side or len(side) == n_points:
                raise WallspaceError(f"wall {i} has an empty side")
            canonical = side if 0 in side else frozenset(range(n_points)) - side
            if canonical in seen:
                raise WallspaceError(f"wall {i} duplicates an earlier bipartition")
            seen.add(canonical)
            norm.append(side)
        object.__setattr__(self, "n_points", n_points)
        object.__setattr__(self, "walls", tuple(norm))

    @property
    def n_walls(self) -> int:
        return len(self.walls)

    def separating_walls(self, p: int, q: int) -> tuple:
        self._check_point(p)
        self._check_point(q)
        return tuple(i for i, side in enumerate(self.walls)
                     if (p in side) != (q in side))

    def _check_point(self, p):
        if not isinstance(p, int) or not 0 <= p < self.n_points:
            raise WallspaceError(f"unknown point {p!r}")

    def to_json_dict(self) -> dict:
        return {"points": self.n_points,
                "walls": [sorted(w) for w in self.walls]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Wallspace":
        try:
            return cls(data["points"], data["walls"])
        except (KeyError, TypeError):
            raise WallspaceError('wallspace JSON needs "points" and "walls"') from None


def canonical_orientation(space: Wallspace, point: int) -> tuple:
    """Orientation choosing, for every wall, the side containing ``point``.

    Encoded as a tuple of bits: 0 = the stored left side, 1 = the complement.
    """
    space._check_point(point)
    return tuple(0 if point in side else 1 for side in space.walls)


def _side_masks(space: Wallspace):
    left = []
    full = (1 << space.n_points) - 1
    for side in space.walls:
        m = 0
        for p in side:
            m |= 1 << p
        left.append((m, full & ~m))
    return left


def dual_with_orientations(space: Wallspace):
    """Dual cube complex plus the orientation bitmask of each vertex.

    Bit i of a vertex mask is 1 when the vertex chooses the complement of
    wall i's stored side.  Hyperplane i of the complex is wall i.
    """
    n_walls = space.n_walls
    masks = _side_masks(space)

    def chosen(mask, i):
        return masks[i][mask >> i & 1]

    seeds = set()
    for p in range(space.n_points):
        bits = 0
        for i, side in enumerate(space.walls):
            if p not in side:
                bits |= 1 << i
        seeds.add(bits)

    seen = set(seeds)
    queue = deque(sorted(seeds))
    while queue:
        o = queue.popleft()
        for i in range(n_walls):
            flipped = o ^ (1 << i)
            if flipped in seen:
                continue
            new_side = chosen(flipped, i)
            if all(new_side & chosen(o, j) for j in range(n_walls) if j != i):
                seen.add(flipped)
                queue.append(flipped)

    orientations = sorted(seen)
    index = {o: v for v, o in enumerate(orientations)}
    edges = []
    for o in orientations:
        for i in range(n_walls):
            flipped = o ^ (1 << i)
            if flipped > o and flipped in seen:
                edges.append((index[o], index[flipped], i))
    complex_ = CubeComplex(len(orientations), edges)
    return complex_, tuple(orientations)


def dual(space: Wallspace) -> CubeComplex:
    """Sageev dual of a finite wallspace; hyperplane ids equal wall ids."""
    return dual_with_orientations(space)[0]


def grid_wallspace(m: int, n: int) -> Wallspace:
    """Walls cutting an m x n grid of points between consecutive columns/rows."""
    if m < 1 or n < 1:
        raise WallspaceError("grid needs positive dimensions")
    walls = []
    for i in range(m - 1):
        walls.append([x * n + y for x in range(i + 1) for y in range(n)])
    for j in range(n - 1):
        walls.append([x * n + y for x in range(m) for y in range(j + 1)])
    return Wallspace(m * n, walls)
