import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_wallspace
from cubeflats.complexes import CubeComplex, isomorphic
from cubeflats.wallspaces import (Wallspace, WallspaceError,
                                  canonical_orientation, dual,
                                  dual_with_orientations, grid_wallspace)


class TestWallspaceInvariants:
    def test_rejects_empty_side(self):
        with pytest.raises(WallspaceError):
            Wallspace(3, [[]])
        with pytest.raises(WallspaceError):
            Wallspace(3, [[0, 1, 2]])

    def test_rejects_duplicate_bipartition(self):
        with pytest.raises(WallspaceError):
            Wallspace(3, [[0], [1, 2]])  # same wall named from both sides

    def test_rejects_unknown_point(self):
        with pytest.raises(WallspaceError):
            Wallspace(2, [[5]])

    def test_json_round_trip(self):
        s = grid_wallspace(3, 2)
        again = Wallspace.from_json_dict(s.to_json_dict())
        assert again == s


class TestCanonicalOrientation:
    def test_no_walls(self):
        assert canonical_orientation(Wallspace(2, []), 0) == ()

    def test_one_wall_left(self):
        s = Wallspace(2, [[0]])
        assert canonical_orientation(s, 0) == (0,)
        assert canonical_orientation(s, 1) == (1,)

    def test_two_crossing_walls_quadrant(self):
        s = Wallspace(4, [[0, 1], [0, 2]])
        assert canonical_orientation(s, 0) == (0, 0)
        assert canonical_orientation(s, 3) == (1, 1)

    def test_unknown_point(self):
        with pytest.raises(WallspaceError):
            canonical_orientation(Wallspace(2, [[0]]), 7)

    def test_differs_on_separating_walls(self):
        rng = random.Random(11)
        for _ in range(20):
            s = random_wallspace(rng, max_points=7, max_walls=9)
            p, q = rng.randrange(s.n_points), rng.randrange(s.n_points)
            op, oq = canonical_orientation(s, p), canonical_orientation(s, q)
            diff = tuple(i for i in range(s.n_walls) if op[i] != oq[i])
            assert diff == s.separating_walls(p, q)


class TestDual:
    def test_one_wall_gives_edge(self):
        c = dual(Wallspace(2, [[0]]))
        assert (c.n_vertices, len(c.edges), c.n_hyperplanes) == (2, 1, 1)

    def test_two_crossing_walls_give_square(self):
        c = dual(Wallspace(4, [[0, 1], [0, 2]]))
        assert c.n_vertices == 4
        assert isomorphic(c, CubeComplex.grid(2, 2))

    def test_nested_walls_give_path(self):
        c = dual(Wallspace(3, [[0], [0, 1]]))
        assert c.n_vertices == 3
        assert isomorphic(c, CubeComplex.grid(3, 1))

    def test_grid_duals(self):
        for m, n in [(2, 2), (2, 4), (3, 3), (4, 5)]:
            c = dual(grid_wallspace(m, n))
            assert isomorphic(c, CubeComplex.grid(m, n))

    def test_hyperplanes_are_walls(self):
        rng = random.Random(5)
        for _ in range(15):
            s = random_wallspace(rng, max_points=6, max_walls=8)
            c = dual(s)
            assert c.n_hyperplanes == s.n_walls

    def test_vertices_are_consistent_orientations(self):
        s = Wallspace(4, [[0, 1], [0, 2], [0]])
        c, orientations = dual_with_orientations(s)
        assert len(orientations) == c.n_vertices
        for o in orientations:
            for i in range(s.n_walls):
                side_i = s.walls[i] if not o >> i & 1 \
                    else frozenset(range(s.n_points)) - s.walls[i]
                for j in range(i + 1, s.n_walls):
                    side_j = s.walls[j] if not o >> j & 1 \
                        else frozenset(range(s.n_points)) - s.walls[j]
                    assert side_i & side_j

    def test_tripod_center(self):
        # three singleton walls on a triangle force an orientation that no
        # point induces: the dual is a tripod
        s = Wallspace(3, [[0], [1], [2]])
        c = dual(s)
        assert c.n_vertices == 4
        degrees = sorted(len(a) for a in c.adjacency)
        assert degrees == [1, 1, 1, 3]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9))
def test_random_duals_fully_validate(seed):
    rng = random.Random(seed)
    s = random_wallspace(rng, max_points=6, max_walls=9)
    c = dual(s)
    c.validate()


def test_fourteen_wall_duals_fully_validate():
    # full validation checks distance == separating-hyperplane count for
    # every vertex pair, plus the median axiom
    rng = random.Random(77)
    for _ in range(5):
        s = random_wallspace(rng, max_points=8, max_walls=14)
        dual(s).validate()


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=4), st.integers(min_value=2, max_value=4))
def test_grid_wallspace_shape(m, n):
    s = grid_wallspace(m, n)
    assert s.n_points == m * n
    assert s.n_walls == (m - 1) + (n - 1)
