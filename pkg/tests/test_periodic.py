import itertools
import random
from fractions import Fraction

import pytest

from conftest import load_periodic
from cubeflats.complexes import CubeComplex, isomorphic
from cubeflats.periodic import (Aligned, Crossing, CrossingInterval,
                                ParallelismClass, PeriodicWallspace,
                                PushoffAuditError, QuasilineFailure,
                                SemiCrossing, SemiCrossingPresent,
                                ValidationError, WindowError, alignment_classes,
                                classify_pair, dichotomy, disjointness_index,
                                pushoff, quasiline_certificate, validate,
                                window_hull)

EMPTY = CrossingInterval.empty()
ALL = CrossingInterval.always()


def one_class(reps, crossing, period="1", direction=(1,), rank=1):
    return PeriodicWallspace(
        rank, [ParallelismClass(direction, period, reps, crossing)])


class TestCrossingInterval:
    def test_contains(self):
        assert not EMPTY.contains(0)
        assert ALL.contains(-17)
        f = CrossingInterval.finite(-2, 3)
        assert f.contains(-2) and f.contains(3) and not f.contains(4)
        assert CrossingInterval.at_least(1).contains(5)
        assert not CrossingInterval.at_least(1).contains(0)
        assert CrossingInterval.at_most(-1).contains(-9)

    def test_negate_involution(self):
        cases = [EMPTY, ALL, CrossingInterval.finite(-1, 4),
                 CrossingInterval.at_least(2), CrossingInterval.at_most(-3)]
        for iv in cases:
            assert iv.negate().negate() == iv
            for d in range(-6, 7):
                assert iv.contains(d) == iv.negate().contains(-d)

    def test_json_round_trip(self):
        for iv in [EMPTY, ALL, CrossingInterval.finite(0, 2),
                   CrossingInterval.at_least(-1)]:
            assert CrossingInterval.from_json_dict(iv.to_json_dict()) == iv


class TestValidate:
    def test_fixtures_validate(self, grid_pw, glide_pw, halfplane_pw):
        for pw in (grid_pw, glide_pw, halfplane_pw):
            validate(pw)

    def test_antisymmetry_violation(self):
        pw = one_class(["0", "1/2"], {
            (0, 0): EMPTY, (1, 1): EMPTY,
            (0, 1): CrossingInterval.at_least(0),
            (1, 0): CrossingInterval.at_least(0)})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "antisymmetry"

    def test_self_interval_must_be_finite(self):
        pw = one_class(["0"], {(0, 0): CrossingInterval.at_least(1)})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "self-interval"

    def test_self_interval_must_be_symmetric(self):
        pw = one_class(["0"], {(0, 0): CrossingInterval.finite(-1, 2)})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "self-interval"

    def test_alignment_transitivity_violation(self):
        pw = one_class(["0", "1/3", "2/3"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (2, 2): EMPTY,
            (0, 1): CrossingInterval.finite(-1, 1),
            (1, 2): CrossingInterval.finite(-1, 1),
            (0, 2): ALL, (2, 0): ALL})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "alignment-transitivity"

    def test_semicrossing_transitivity_violation(self):
        pw = one_class(["0", "1/3", "2/3"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (2, 2): EMPTY,
            (0, 1): CrossingInterval.at_most(-1),
            (1, 2): CrossingInterval.at_most(-1),
            (0, 2): EMPTY, (2, 0): EMPTY})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "semicrossing-transitivity"

    def test_maximal_class_coherence_violation(self):
        # orbits 1, 2 aligned; orbit 0 dominates 1 but crosses 2
        pw = one_class(["0", "1/3", "2/3"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (2, 2): EMPTY,
            (0, 1): CrossingInterval.at_most(-1),
            (1, 2): CrossingInterval.finite(-1, 1),
            (0, 2): ALL, (2, 0): ALL})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "maximal-class"

    def test_parallel_directions_rejected(self):
        pw = PeriodicWallspace(2, [
            ParallelismClass((1, 0), "1", ["0"], {(0, 0): EMPTY}),
            ParallelismClass((2, 0), "1", ["0"], {(0, 0): EMPTY})])
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma in ("direction", "parallel-directions")

    def test_offset_outside_period(self):
        pw = one_class(["3/2"], {(0, 0): EMPTY})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "offset"

    def test_coincident_noncrossing_walls_rejected(self):
        pw = one_class(["1/2", "1/2"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (0, 1): EMPTY})
        with pytest.raises(ValidationError) as err:
            validate(pw)
        assert err.value.lemma == "coincident-walls"

    def test_rank_one_allows_single_class_only(self):
        pw = PeriodicWallspace(1, [
            ParallelismClass((1,), "1", ["0"], {(0, 0): EMPTY}),
            ParallelismClass((1,), "1", ["1/2"], {(0, 0): EMPTY})])
        with pytest.raises(ValidationError):
            validate(pw)


class TestClassifyPair:
    def test_cross_class_pairs_cross(self, grid_pw):
        assert classify_pair(grid_pw, (0, 0), (1, 0)) == Crossing()

    def test_halfplane_pair(self, halfplane_pw):
        assert classify_pair(halfplane_pw, (0, 1), (0, 0)) == SemiCrossing("up", 0)
        assert classify_pair(halfplane_pw, (0, 0), (0, 1)) == SemiCrossing("down", 0)

    def test_self_pair_aligned(self, grid_pw):
        assert classify_pair(grid_pw, (0, 0), (0, 0)) == Aligned()

    def test_all_interval_crosses(self, glide_pw):
        assert classify_pair(glide_pw, (0, 0), (0, 1)) == Crossing()

    def test_swap_mirrors_direction(self):
        rng = random.Random(9)
        for _ in range(20):
            lo = rng.randrange(-3, 4)
            pw = one_class(["0", "1/2"], {
                (0, 0): EMPTY, (1, 1): EMPTY,
                (0, 1): CrossingInterval.at_least(lo)})
            a = classify_pair(pw, (0, 0), (0, 1))
            b = classify_pair(pw, (0, 1), (0, 0))
            assert a.direction != b.direction
            assert a.threshold == b.threshold

    def test_unknown_ref(self, grid_pw):
        with pytest.raises(ValueError):
            classify_pair(grid_pw, (0, 0), (5, 5))


class TestAlignmentClasses:
    def test_grid_two_classes(self, grid_pw):
        assert alignment_classes(grid_pw) == (((0, 0),), ((1, 0),))

    def test_glide_two_classes_rank_one(self, glide_pw):
        classes = alignment_classes(glide_pw)
        assert len(classes) == 2

    def test_all_interval_separates_classes(self):
        pw = one_class(["0", "1/2"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (0, 1): ALL})
        assert alignment_classes(pw) == (((0, 0),), ((0, 1),))

    def test_aligned_orbits_merge(self):
        pw = one_class(["0", "1/2"], {
            (0, 0): EMPTY, (1, 1): EMPTY,
            (0, 1): CrossingInterval.finite(-1, 1)})
        assert alignment_classes(pw) == (((0, 0), (0, 1)),)

    def test_semicrossing_rejected(self, halfplane_pw):
        with pytest.raises(SemiCrossingPresent):
            alignment_classes(halfplane_pw)


class TestDisjointnessIndex:
    def test_empty(self, grid_pw):
        assert disjointness_index(grid_pw, 0, 0) == 1

    def test_finite_scan(self):
        for hi, expected in [(1, 2), (2, 3), (4, 5)]:
            pw = one_class(["0"], {(0, 0): CrossingInterval.finite(-hi, hi)})
            assert disjointness_index(pw, 0, 0) == expected


def brute_force_window_vertices(pw, hull):
    """All pairwise-consistent orientations of the effective walls, by
    exhaustive enumeration (independent of the BFS construction)."""
    walls = hull.walls
    n = len(walls)
    assert n <= 18, "oracle only for small windows"

    def cross(i, j):
        wi, wj = walls[i], walls[j]
        if wi.class_index != wj.class_index:
            return True
        d = wj.translate - wi.translate
        if (wi.rep_index, wi.translate) == (wj.rep_index, wj.translate):
            return False
        return pw.interval(wi.class_index, wi.rep_index, wj.rep_index).contains(d)

    count = 0
    found = set()
    for bits in range(1 << n):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if cross(i, j):
                    continue
                lo, hi = (i, j) if walls[i].trace < walls[j].trace else (j, i)
                if not bits >> lo & 1 and bits >> hi & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
            found.add(bits)
    return count, found


class TestWindowHull:
    def test_radius_positive(self, grid_pw):
        with pytest.raises(ValueError):
            window_hull(grid_pw, 0)

    def test_grid_window_is_grid(self, grid_pw):
        h = window_hull(grid_pw, 2)
        assert h.complex.n_vertices == 25
        assert isomorphic(h.complex, CubeComplex.grid(5, 5))

    def test_glide_window_is_square_grid(self, glide_pw):
        h = window_hull(glide_pw, 2)
        assert isomorphic(h.complex, CubeComplex.grid(5, 5))

    def test_halfplane_window_matches_enumeration(self, halfplane_pw):
        h = window_hull(halfplane_pw, 2)
        count, found = brute_force_window_vertices(halfplane_pw, h)
        assert h.complex.n_vertices == count
        assert set(h.orientations) == found
        h.complex.validate()

    def test_halfplane_window_is_not_full_grid(self, halfplane_pw):
        # two orbit families of 2N walls each; semi-crossing cuts a corner
        h = window_hull(halfplane_pw, 2)
        assert h.complex.n_hyperplanes == 8
        assert h.complex.n_vertices < 25

    def test_windows_validate_as_median_complexes(self, grid_pw, glide_pw,
                                                  halfplane_pw):
        for pw in (grid_pw, glide_pw, halfplane_pw):
            window_hull(pw, 3).complex.validate()

    def test_canonical_vertices_exist(self, halfplane_pw):
        h = window_hull(halfplane_pw, 3)
        assert h.samples
        for pt, v in h.canonical.items():
            assert 0 <= v < h.complex.n_vertices

    def test_hyperplanes_are_effective_walls(self, halfplane_pw):
        h = window_hull(halfplane_pw, 3)
        assert h.complex.n_hyperplanes == len(h.walls)


class TestQuasilineCertificate:
    def test_nested_family_width_zero(self, grid_pw):
        assert quasiline_certificate(grid_pw, [(0, 0)], 4) == 0

    def test_self_crossing_width_one(self):
        pw = one_class(["0"], {(0, 0): CrossingInterval.finite(-1, 1)})
        assert quasiline_certificate(pw, [(0, 0)], 4) == 1

    def test_merged_classes_fail(self, grid_pw):
        with pytest.raises(QuasilineFailure):
            quasiline_certificate(grid_pw, [(0, 0), (1, 0)], 4)


class TestDichotomy:
    def test_grid_product(self, grid_pw):
        rep = dichotomy(grid_pw, 2, 4)
        assert rep.kind == "product-of-quasilines"
        assert len(rep.verdict.factors) == 2
        assert all(f.quasiline_width == 0 for f in rep.verdict.factors)
        assert rep.hull_vertex_count == \
            rep.factor_vertex_counts[0] * rep.factor_vertex_counts[1]

    def test_glide_excess_classes(self, glide_pw):
        rep = dichotomy(glide_pw, 1, 4)
        assert rep.kind == "non-cocompact"
        assert rep.verdict.witness.kind == "excess-classes"
        assert rep.verdict.witness.alignment_class_count == 2

    def test_halfplane_semicrossing(self, halfplane_pw):
        rep = dichotomy(halfplane_pw, 1, 6)
        assert rep.kind == "non-cocompact"
        w = rep.verdict.witness
        assert w.kind == "semi-crossing"
        assert w.maximal_class == ((0, 0),)
        assert w.min_displacement == w.pushoff_k == 1

    def test_rank_bounds(self, grid_pw):
        with pytest.raises(ValueError):
            dichotomy(grid_pw, 3, 4)

    def test_verdict_stable_under_doubling(self, grid_pw, glide_pw, halfplane_pw):
        for pw, rank in [(grid_pw, 2), (glide_pw, 1), (halfplane_pw, 1)]:
            small = dichotomy(pw, rank, 3)
            large = dichotomy(pw, rank, 6)
            assert small.kind == large.kind
            if small.kind == "non-cocompact":
                ws, wl = small.verdict.witness, large.verdict.witness
                assert ws.kind == wl.kind
                if ws.kind == "semi-crossing":
                    assert ws.maximal_class == wl.maximal_class

    def test_random_proximity_inputs_decompose(self):
        # walls cross exactly when their traces are closer than a reach
        # threshold: always realizable, always aligned-only
        rng = random.Random(23)
        for _ in range(10):
            n_orbits = rng.randrange(1, 4)
            offsets = [Fraction(o, 10)
                       for o in sorted(rng.sample(range(10), n_orbits))]
            reach = Fraction(rng.randrange(0, 3), 2)
            crossing = {}
            for j in range(n_orbits):
                for jp in range(n_orbits):
                    delta = offsets[jp] - offsets[j]
                    ds = [d for d in range(-4, 5) if abs(delta + d) < reach]
                    crossing[(j, jp)] = (
                        CrossingInterval.finite(min(ds), max(ds)) if ds else EMPTY)
            pw = one_class(offsets, crossing)
            validate(pw)
            classes = alignment_classes(pw)
            assert len(classes) == 1
            rep = dichotomy(pw, 1, 3)
            assert rep.kind == "product-of-quasilines"


class TestPushoff:
    def test_empty_class_is_identity(self, grid_pw):
        po = pushoff(grid_pw, [], 1, 4)
        assert po.audit.injective
        assert po.audit.min_canonical_displacement is None
        n = po.domain.complex.n_vertices
        assert len(set(po.vertex_map)) == n

    def test_halfplane_k1(self, halfplane_pw):
        po = pushoff(halfplane_pw, [(0, 0)], 1, 4)
        assert po.audit.injective and po.audit.distance_nonincreasing
        assert po.audit.min_canonical_displacement == 1

    def test_halfplane_k2_n6(self, halfplane_pw):
        po = pushoff(halfplane_pw, [(0, 0)], 2, 6)
        assert po.audit.min_canonical_displacement == 2

    def test_not_maximal_rejected(self, halfplane_pw):
        with pytest.raises(ValueError, match="maximal"):
            pushoff(halfplane_pw, [(0, 1)], 1, 6)

    def test_shift_escaping_window_rejected(self, halfplane_pw):
        with pytest.raises(WindowError):
            pushoff(halfplane_pw, [(0, 0)], 4, 6)

    def test_unrealizable_offsets_rejected(self):
        # with the dominating orbit at the larger offset, some of its
        # non-crossing walls sit above dominated ones they are supposed to be
        # below: the orbit-level laws hold but the materialized window has
        # intransitive nesting, so no complex realizes it
        pw = one_class(["1/2", "0"], {
            (0, 0): EMPTY, (1, 1): EMPTY,
            (1, 0): CrossingInterval.at_least(1)})
        validate(pw)
        with pytest.raises((ValidationError, PushoffAuditError, WindowError)) as err:
            pushoff(pw, [(0, 0)], 2, 6)
        if isinstance(err.value, ValidationError):
            assert err.value.lemma == "nesting-transitivity"

    def test_staircase_variants(self):
        # dominated orbit at varying offsets above the dominating one
        for off in ("1/4", "1/2", "3/4"):
            pw = one_class(["0", off], {
                (0, 0): EMPTY, (1, 1): EMPTY,
                (1, 0): CrossingInterval.at_least(1)})
            validate(pw)
            for k, radius in [(1, 4), (2, 6)]:
                po = pushoff(pw, [(0, 0)], k, radius)
                assert po.audit.min_canonical_displacement == k

    def test_two_dominated_orbits(self):
        # one maximal orbit pushing off an alignment class of two orbits
        pw = one_class(["0", "1/2", "3/4"], {
            (0, 0): EMPTY, (1, 1): EMPTY, (2, 2): EMPTY,
            (1, 2): EMPTY,
            (1, 0): CrossingInterval.at_least(1),
            (2, 0): CrossingInterval.at_least(1)})
        validate(pw)
        rep = dichotomy(pw, 1, 6)
        assert rep.verdict.witness.maximal_class == ((0, 0),)
        po = pushoff(pw, [(0, 0)], 2, 6)
        assert po.audit.min_canonical_displacement == 2


class TestSerialization:
    def test_json_round_trip(self, grid_pw, glide_pw, halfplane_pw):
        for pw in (grid_pw, glide_pw, halfplane_pw):
            again = PeriodicWallspace.from_json_dict(pw.to_json_dict())
            assert again.rank == pw.rank
            for c1, c2 in zip(again.classes, pw.classes):
                assert (c1.direction, c1.period, c1.offsets) == \
                    (c2.direction, c2.period, c2.offsets)
                assert c1.crossing == c2.crossing

    def test_rationals_serialized_exactly(self, halfplane_pw):
        d = halfplane_pw.to_json_dict()
        assert d["classes"][0]["reps"] == ["0", "1/2"]
        assert d["classes"][0]["period"] == "1"

    def test_bad_crossing_key_rejected(self):
        with pytest.raises(ValueError, match="crossing key"):
            PeriodicWallspace.from_json_dict({
                "rank": 1,
                "classes": [{"direction": [1], "period": "1", "reps": ["0"],
                             "crossing": {"0-0": {"kind": "empty"}}}]})


class TestTrichotomyProperty:
    def test_every_pair_classified_once(self, grid_pw, glide_pw, halfplane_pw):
        for pw in (grid_pw, glide_pw, halfplane_pw):
            refs = list(pw.orbit_refs())
            for a, b in itertools.combinations(refs, 2):
                cls = classify_pair(pw, a, b)
                assert cls.kind in ("crossing", "semi-crossing", "aligned")
                mirror = classify_pair(pw, b, a)
                assert (cls.kind == mirror.kind)
