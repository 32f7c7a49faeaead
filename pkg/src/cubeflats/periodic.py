"""Hyperplane orbits over a periodic flat.

The input is a rank-p lattice acting on a flat, described combinatorially: a
finite list of parallelism classes of walls, each with a normal direction, a
translation period, finitely many orbit representatives (offsets), and
crossing-interval tables saying which lattice translates of one representative
cross another.  Whether two walls that are parallel in the flat cross outside
it depends on the ambient complex, so crossing data is input, not derived; the
tables depend only on the translate difference, a consequence of the lattice
acting equivariantly.

From that data this module classifies orbit pairs into crossing,
semi-crossing, and aligned, verifies the coherence laws any genuine complex
imposes on the tables (``validate``), materializes finite windows of the hull
of the flat as cube complexes (``window_hull``), certifies alignment classes
as quasilines, decides the hull dichotomy (``dichotomy``), and constructs the
shift maps whose displacement witnesses non-cocompactness (``pushoff``).

Infinite statements are checked at a window radius and required to be stable
when the radius doubles.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .complexes import CubeComplex

__all__ = [
    "Aligned",
    "Crossing",
    "CrossingInterval",
    "DichotomyReport",
    "ExcessClassesWitness",
    "NonCocompact",
    "OrbitRef",
    "ParallelismClass",
    "PeriodicWallspace",
    "ProductOfQuasilines",
    "PushoffAuditError",
    "PushoffResult",
    "QuasilineFailure",
    "SemiCrossing",
    "SemiCrossingPresent",
    "SemiCrossingWitness",
    "ValidationError",
    "WindowError",
    "WindowHull",
    "WindowWall",
    "alignment_classes",
    "classify_pair",
    "dichotomy",
    "disjointness_index",
    "pushoff",
    "quasiline_certificate",
    "validate",
    "window_hull",
]

OrbitRef = tuple  # (class_index, rep_index)

UP = "up"
DOWN = "down"


class ValidationError(ValueError):
    """The crossing data violates a law that every genuine complex obeys.

    ``lemma`` is a machine-readable name of the violated law and ``witness``
    the offending indices.
    """

    def __init__(self, lemma: str, message: str, witness=None):
        super().__init__(f"[{lemma}] {message}")
        self.lemma = lemma
        self.witness = witness


class SemiCrossingPresent(ValueError):
    """Alignment classes are undefined while a semi-crossing pair exists."""


class WindowError(ValueError):
    """A windowed computation cannot be carried out at this radius."""


class PushoffAuditError(ValueError):
    """A push-off audit assertion failed: the input data is not realizable."""


class QuasilineFailure(ValueError):
    """No window-stable crossing width exists for the class."""

    def __init__(self, width_small, width_large):
        super().__init__(
            f"crossing width {width_small} at the base window grew to "
            f"{width_large} at the doubled window")
        self.width_small = width_small
        self.width_large = width_large


# ---------------------------------------------------------------------------
# crossing intervals


@dataclass(frozen=True)
class CrossingInterval:
    """Subset of the integers, always an interval: which translates z^d of one
    wall cross another.  Kinds: empty | finite | atleast | atmost | all."""

    kind: str
    lo: int | None = None
    hi: int | None = None

    KINDS = ("empty", "finite", "atleast", "atmost", "all")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown interval kind {self.kind!r}")
        if self.kind == "finite":
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise ValueError(f"bad finite interval [{self.lo}, {self.hi}]")
        elif self.kind == "atleast" and self.lo is None:
            raise ValueError("atleast interval needs lo")
        elif self.kind == "atmost" and self.hi is None:
            raise ValueError("atmost interval needs hi")

    @staticmethod
    def empty() -> "CrossingInterval":
        return CrossingInterval("empty")

    @staticmethod
    def finite(lo: int, hi: int) -> "CrossingInterval":
        return CrossingInterval("finite", lo, hi)

    @staticmethod
    def at_least(lo: int) -> "CrossingInterval":
        return CrossingInterval("atleast", lo)

    @staticmethod
    def at_most(hi: int) -> "CrossingInterval":
        return CrossingInterval("atmost", None, hi)

    @staticmethod
    def always() -> "CrossingInterval":
        return CrossingInterval("all")

    def contains(self, d: int) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "all":
            return True
        if self.kind == "finite":
            return self.lo <= d <= self.hi
        if self.kind == "atleast":
            return d >= self.lo
        return d <= self.hi

    def negate(self) -> "CrossingInterval":
        """Interval of -d for d in this interval."""
        if self.kind == "empty" or self.kind == "all":
            return self
        if self.kind == "finite":
            return CrossingInterval.finite(-self.hi, -self.lo)
        if self.kind == "atleast":
            return CrossingInterval.at_most(-self.lo)
        return CrossingInterval.at_least(-self.hi)

    @property
    def is_finite(self) -> bool:
        return self.kind in ("empty", "finite")

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.lo is not None:
            out["lo"] = self.lo
        if self.hi is not None:
            out["hi"] = self.hi
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "CrossingInterval":
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError(f"bad crossing interval {data!r}")
        return cls(data["kind"], data.get("lo"), data.get("hi"))


# ---------------------------------------------------------------------------
# pair classification results


@dataclass(frozen=True)
class Crossing:
    kind = "crossing"


@dataclass(frozen=True)
class SemiCrossing:
    """One orbit crosses the other from a translate threshold on.

    ``direction`` is "up" when large positive translates of the second
    argument cross the first (the second orbit dominates), "down" in the
    mirrored case.  ``threshold`` is the least m with crossing beyond m.
    """

    direction: str
    threshold: int
    kind = "semi-crossing"


@dataclass(frozen=True)
class Aligned:
    kind = "aligned"


# ---------------------------------------------------------------------------
# the periodic wallspace


@dataclass(frozen=True)
class ParallelismClass:
    """Walls meeting the flat in parallel affine hyperplanes.

    ``direction`` is the primitive integer normal; a representative ``j`` at
    offset ``offsets[j]`` has translates at trace offsets[j] + period * a.
    ``crossing[(j, jp)]`` is the set of d such that representative j crosses
    the d-th translate of representative jp.
    """

    direction: tuple
    period: Fraction
    offsets: tuple
    crossing: dict

    def __init__(self, direction, period, offsets, crossing=None):
        object.__setattr__(self, "direction", tuple(int(x) for x in direction))
        object.__setattr__(self, "period", Fraction(period))
        object.__setattr__(self, "offsets", tuple(Fraction(o) for o in offsets))
        object.__setattr__(self, "crossing", dict(crossing or {}))

    @property
    def n_reps(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class PeriodicWallspace:
    rank: int
    classes: tuple

    def __init__(self, rank: int, classes: Iterable[ParallelismClass]):
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "classes", tuple(classes))

    def interval(self, class_index: int, j: int, jp: int) -> CrossingInterval:
        """Crossing interval for ordered pair (j, jp); missing entries default
        to the negation of the reverse entry, then to empty."""
        table = self.classes[class_index].crossing
        if (j, jp) in table:
            return table[(j, jp)]
        if (jp, j) in table:
            return table[(jp, j)].negate()
        return CrossingInterval.empty()

    def orbit_refs(self):
        for ci, cls in enumerate(self.classes):
            for j in range(cls.n_reps):
                yield (ci, j)

    def _check_ref(self, ref) -> OrbitRef:
        try:
            ci, j = int(ref[0]), int(ref[1])
            self.classes[ci].offsets[j]
        except (TypeError, ValueError, IndexError):
            raise ValueError(f"unknown orbit reference {ref!r}") from None
        if ci < 0 or j < 0:
            raise ValueError(f"unknown orbit reference {ref!r}")
        return (ci, j)

    def to_json_dict(self) -> dict:
        classes = []
        for cls in self.classes:
            crossing = {f"({j},{jp})": iv.to_json_dict()
                        for (j, jp), iv in sorted(cls.crossing.items())}
            classes.append({
                "direction": list(cls.direction),
                "period": str(cls.period),
                "reps": [str(o) for o in cls.offsets],
                "crossing": crossing,
            })
        return {"rank": self.rank, "classes": classes}

    @classmethod
    def from_json_dict(cls, data: dict) -> "PeriodicWallspace":
        try:
            rank = int(data["rank"])
            raw_classes = data["classes"]
        except (KeyError, TypeError):
            raise ValueError('periodic wallspace JSON needs "rank" and "classes"') from None
        out = []
        for c in raw_classes:
            crossing = {}
            for key, val in (c.get("crossing") or {}).items():
                m = re.fullmatch(r"\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*", str(key))
                if not m:
                    raise ValueError(f'bad crossing key {key!r}, expected "(j,jp)"')
                crossing[(int(m.group(1)), int(m.group(2)))] = \
                    CrossingInterval.from_json_dict(val)
            out.append(ParallelismClass(c["direction"], str(c["period"]),
                                        [str(r) for r in c["reps"]], crossing))
        return cls(rank, out)


# ---------------------------------------------------------------------------
# validation of the coherence laws


def _relation(pw: PeriodicWallspace, ci: int, j: int, jp: int) -> str:
    """cross | aligned | gt | lt for same-class ordered pair (j, jp).

    gt means orbit j dominates orbit jp (j crosses all sufficiently negative
    translates of jp); lt is the mirror.
    """
    iv = pw.interval(ci, j, jp)
    if iv.kind == "all":
        return "cross"
    if iv.kind == "atmost":
        return "gt"
    if iv.kind == "atleast":
        return "lt"
    return "aligned"


def validate(pw: PeriodicWallspace) -> None:
    """Check the data against every law a genuine complex imposes.

    Raises ValidationError naming the violated law: direction/period/offset
    shape errors, "self-interval", "antisymmetry" (the reverse table entry
    must be the negation), "coincident-walls", "alignment-transitivity",
    "semicrossing-antisymmetry"/"semicrossing-transitivity" (the semi-crossing
    relation is a strict partial order), and "maximal-class" (relations
    between two alignment classes must be uniform, so a maximal class either
    crosses or dominates everything outside it).
    """
    if pw.rank < 1:
        raise ValidationError("rank", f"rank must be positive, got {pw.rank}")
    if not pw.classes:
        raise ValidationError("classes", "at least one parallelism class required")

    for ci, cls in enumerate(pw.classes):
        if len(cls.direction) != pw.rank:
            raise ValidationError(
                "direction", f"class {ci} direction has length "
                f"{len(cls.direction)}, expected rank {pw.rank}", (ci,))
        g = math.gcd(*(abs(x) for x in cls.direction)) if cls.direction else 0
        if g != 1:
            raise ValidationError(
                "direction", f"class {ci} direction {cls.direction} is not a "
                "primitive nonzero integer vector", (ci,))
        if cls.period <= 0:
            raise ValidationError("period", f"class {ci} period must be positive", (ci,))
        if cls.n_reps < 1:
            raise ValidationError("offsets", f"class {ci} has no representatives", (ci,))
        for j, off in enumerate(cls.offsets):
            if not 0 <= off < cls.period:
                raise ValidationError(
                    "offset", f"class {ci} rep {j} offset {off} outside "
                    f"[0, {cls.period})", (ci, j))
        for (j, jp) in cls.crossing:
            if not (0 <= j < cls.n_reps and 0 <= jp < cls.n_reps):
                raise ValidationError(
                    "crossing-key", f"class {ci} crossing entry ({j},{jp}) "
                    "references an unknown representative", (ci, j, jp))

    for ci, cj in itertools.combinations(range(len(pw.classes)), 2):
        u = pw.classes[ci].direction
        v = pw.classes[cj].direction
        if all(u[a] * v[b] == u[b] * v[a]
               for a in range(pw.rank) for b in range(pw.rank)):
            raise ValidationError(
                "parallel-directions",
                f"classes {ci} and {cj} have parallel directions", (ci, cj))

    for ci, cls in enumerate(pw.classes):
        n = cls.n_reps
        for j in range(n):
            iv = pw.interval(ci, j, j)
            if not iv.is_finite:
                raise ValidationError(
                    "self-interval", f"class {ci} rep {j}: a wall meets only "
                    "finitely many of its own translates, interval must be "
                    "empty or finite", (ci, j))
            if iv.kind == "finite" and iv.lo != -iv.hi:
                raise ValidationError(
                    "self-interval", f"class {ci} rep {j}: self interval "
                    f"[{iv.lo},{iv.hi}] is not symmetric about 0", (ci, j))
        for (j, jp), iv in cls.crossing.items():
            if (jp, j) in cls.crossing and cls.crossing[(jp, j)] != iv.negate():
                raise ValidationError(
                    "antisymmetry",
                    f"class {ci}: interval({jp},{j}) is not the negation of "
                    f"interval({j},{jp}); the semi-crossing relation cannot "
                    "be antisymmetric", (ci, j, jp))
        for j in range(n):
            for jp in range(j + 1, n):
                if cls.offsets[j] == cls.offsets[jp] and \
                        not pw.interval(ci, j, jp).contains(0):
                    raise ValidationError(
                        "coincident-walls",
                        f"class {ci} reps {j},{jp} share offset "
                        f"{cls.offsets[j]} but do not cross at translate 0",
                        (ci, j, jp))

        rel = {(j, jp): _relation(pw, ci, j, jp)
               for j in range(n) for jp in range(n) if j != jp}
        for a, b, c in itertools.permutations(range(n), 3):
            if rel[(a, b)] == "aligned" and rel[(b, c)] == "aligned" \
                    and rel[(a, c)] != "aligned":
                raise ValidationError(
                    "alignment-transitivity",
                    f"class {ci}: orbits {a}~{b} and {b}~{c} are aligned but "
                    f"{a},{c} are {rel[(a, c)]}; alignment must be an "
                    "equivalence relation", (ci, a, b, c))
        for a in range(n):
            for b in range(a + 1, n):
                if rel[(a, b)] == "gt" and rel[(b, a)] == "gt":
                    raise ValidationError(
                        "semicrossing-antisymmetry",
                        f"class {ci}: orbits {a} and {b} each dominate the "
                        "other", (ci, a, b))
        for a, b, c in itertools.permutations(range(n), 3):
            if rel[(a, b)] == "gt" and rel[(b, c)] == "gt" and rel[(a, c)] != "gt":
                raise ValidationError(
                    "semicrossing-transitivity",
                    f"class {ci}: {a}>{b}>{c} but the relation of {a},{c} is "
                    f"{rel[(a, c)]}; semi-crossing must be a partial order",
                    (ci, a, b, c))

        groups = _class_alignment_groups(rel, n)
        for g1, g2 in itertools.combinations(groups, 2):
            rels = {rel[(a, b)] for a in g1 for b in g2}
            if len(rels) > 1:
                raise ValidationError(
                    "maximal-class",
                    f"class {ci}: relations between alignment classes {g1} "
                    f"and {g2} are not uniform ({sorted(rels)}); a maximal "
                    "class must cross or dominate each other class as a "
                    "whole", (ci, tuple(g1), tuple(g2)))


def _class_alignment_groups(rel, n):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j in range(n):
        for jp in range(j + 1, n):
            if rel[(j, jp)] == "aligned":
                ra, rb = find(j), find(jp)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for j in range(n):
        groups.setdefault(find(j), []).append(j)
    return sorted(tuple(g) for g in groups.values())


# ---------------------------------------------------------------------------
# classification


def classify_pair(pw: PeriodicWallspace, a, b):
    """Crossing / SemiCrossing / Aligned for two orbit references.

    Expects validated data.  Orbits in different parallelism classes always
    cross.  For same-class pairs the crossing interval decides: all ->
    Crossing, a half-line -> SemiCrossing with its threshold, empty or finite
    -> Aligned.  Swapping the arguments mirrors up and down.
    """
    a = pw._check_ref(a)
    b = pw._check_ref(b)
    if a[0] != b[0]:
        return Crossing()
    if a == b:
        return Aligned()
    iv = pw.interval(a[0], a[1], b[1])
    if iv.kind == "all":
        return Crossing()
    if iv.kind == "atleast":
        return SemiCrossing(UP, iv.lo - 1)
    if iv.kind == "atmost":
        return SemiCrossing(DOWN, -iv.hi - 1)
    return Aligned()


def _alignment_partition(pw: PeriodicWallspace):
    """Alignment classes as tuples of orbit refs, ignoring any semi-crossing.

    Orbits in different parallelism classes cross, so classes never span
    parallelism classes.
    """
    out = []
    for ci, cls in enumerate(pw.classes):
        n = cls.n_reps
        rel = {(j, jp): _relation(pw, ci, j, jp)
               for j in range(n) for jp in range(n) if j != jp}
        for group in _class_alignment_groups(rel, n):
            out.append(tuple((ci, j) for j in group))
    return sorted(out)


def _semicrossing_pairs(pw: PeriodicWallspace):
    pairs = []
    for ci, cls in enumerate(pw.classes):
        for j in range(cls.n_reps):
            for jp in range(j + 1, cls.n_reps):
                if _relation(pw, ci, j, jp) in ("gt", "lt"):
                    pairs.append(((ci, j), (ci, jp)))
    return pairs


def alignment_classes(pw: PeriodicWallspace):
    """Partition of the orbit refs into alignment equivalence classes.

    Only defined when no pair semi-crosses; orbits in distinct classes then
    pairwise cross.
    """
    validate(pw)
    pairs = _semicrossing_pairs(pw)
    if pairs:
        raise SemiCrossingPresent(
            f"semi-crossing pair {pairs[0][0]} / {pairs[0][1]} present; "
            "use dichotomy instead")
    return tuple(_alignment_partition(pw))


def disjointness_index(pw: PeriodicWallspace, class_index: int, rep_index: int) -> int:
    """Smallest n >= 1 with every nonzero multiple of n outside the
    self-crossing interval: the power of the translation acting with
    pairwise-disjoint images of this wall."""
    (class_index, rep_index) = pw._check_ref((class_index, rep_index))
    iv = pw.interval(class_index, rep_index, rep_index)
    if iv.kind == "empty":
        return 1
    n = 1
    while True:
        k = n
        hit = False
        while k <= iv.hi:
            if iv.contains(k) and k != 0:
                hit = True
                break
            k += n
        if not hit:
            return n
        n += 1


# ---------------------------------------------------------------------------
# windowed hulls


@dataclass(frozen=True)
class WindowWall:
    class_index: int
    rep_index: int
    translate: int
    trace: Fraction

    @property
    def orbit(self) -> OrbitRef:
        return (self.class_index, self.rep_index)

    @property
    def key(self):
        return (self.class_index, self.rep_index, self.translate)


@dataclass
class WindowHull:
    """Finite window of the hull of the flat, as a cube complex.

    Hyperplane i of ``complex`` is ``walls[i]``; ``orientations[v]`` has bit i
    set when vertex v sits on the positive side of wall i (larger trace).
    ``samples`` are the flat sample points whose canonical orientations are
    vertices; ``class_span[ci]`` is the (min, max) sample position along class
    ci's direction.
    """

    wallspace: PeriodicWallspace
    radius: int
    walls: tuple
    complex: CubeComplex
    orientations: tuple
    samples: tuple
    class_span: tuple
    canonical: dict
    wall_index: dict
    _below: tuple = field(repr=False, default=())
    _above: tuple = field(repr=False, default=())
    _seeds: tuple = field(repr=False, default=())

    @property
    def vertex_of_mask(self):
        if not hasattr(self, "_mask_index"):
            self._mask_index = {m: v for v, m in enumerate(self.orientations)}
        return self._mask_index

    def orbit_wall_indices(self, ref) -> tuple:
        ref = tuple(ref)
        return tuple(i for i, w in enumerate(self.walls) if w.orbit == ref)

    def class_wall_indices(self, ci: int) -> tuple:
        return tuple(i for i, w in enumerate(self.walls) if w.class_index == ci)


def _achievable_dots(direction, radius):
    """All values of <direction, x> over integer points of the radius box."""
    sums = {0}
    for u in direction:
        step = {u * t for t in range(-radius, radius + 1)}
        sums = {s + d for s in sums for d in step}
    return sums


def _materialize(pw: PeriodicWallspace, radius: int):
    """Effective window walls, per-class sample positions and spans."""
    per_class_walls = []
    spans = []
    positions_per_class = []
    for ci, cls in enumerate(pw.classes):
        raw = []
        for j, off in enumerate(cls.offsets):
            for a in range(-radius, radius + 1):
                raw.append(WindowWall(ci, j, a, off + cls.period * a))
        traces = sorted({w.trace for w in raw})
        trace_set = set(traces)
        mids = [(traces[i] + traces[i + 1]) / 2 for i in range(len(traces) - 1)]
        dots = [Fraction(d) for d in _achievable_dots(cls.direction, radius)
                if Fraction(d) not in trace_set]
        positions = sorted(set(mids) | set(dots))
        positions_per_class.append(tuple(positions))
        if positions:
            span = (positions[0], positions[-1])
            spans.append(span)
            per_class_walls.append(
                [w for w in raw if span[0] < w.trace < span[1]])
        else:
            spans.append(None)
            per_class_walls.append([])
    walls = sorted((w for group in per_class_walls for w in group),
                   key=lambda w: (w.class_index, w.trace, w.rep_index, w.translate))
    return tuple(walls), tuple(spans), tuple(positions_per_class)


def _walls_cross(pw: PeriodicWallspace, w1: WindowWall, w2: WindowWall) -> bool:
    if w1.class_index != w2.class_index:
        return True
    if (w1.rep_index, w1.translate) == (w2.rep_index, w2.translate):
        return False
    d = w2.translate - w1.translate
    if w1.rep_index == w2.rep_index and d == 0:
        return False
    return pw.interval(w1.class_index, w1.rep_index, w2.rep_index).contains(d)


def _constraint_masks(pw, walls):
    """For each wall, bitmasks of same-class non-crossing walls strictly
    below / above it by trace.  Also checks that nesting is transitive,
    which any realizable window must satisfy."""
    n = len(walls)
    below = [0] * n
    above = [0] * n
    by_class = {}
    for i, w in enumerate(walls):
        by_class.setdefault(w.class_index, []).append(i)
    for idxs in by_class.values():
        for x in range(len(idxs)):
            i = idxs[x]
            for y in range(x + 1, len(idxs)):
                j = idxs[y]
                if not _walls_cross(pw, walls[i], walls[j]):
                    # sorted by trace within a class; equal-trace pairs cross
                    below[j] |= 1 << i
                    above[i] |= 1 << j
        for j in idxs:
            bj = below[j]
            i_bits = bj
            while i_bits:
                low = i_bits & -i_bits
                i = low.bit_length() - 1
                i_bits ^= low
                bad = below[i] & ~bj
                if bad:
                    k = (bad & -bad).bit_length() - 1
                    raise ValidationError(
                        "nesting-transitivity",
                        f"walls {walls[k].key} < {walls[i].key} < {walls[j].key} "
                        "are nested pairwise-adjacent but the outer pair "
                        "crosses; no complex realizes this window",
                        (walls[k].key, walls[i].key, walls[j].key))
    return tuple(below), tuple(above)


def _generic_point(pw, walls, rank):
    for den in range(101, 400, 2):
        pt = tuple(Fraction(i + 1, den) for i in range(rank))
        if all(_position(pw, w.class_index, pt) != w.trace for w in walls):
            return pt
    raise WindowError("could not find a sample point off every wall")


def _position(pw, ci, point):
    d = pw.classes[ci].direction
    return sum(Fraction(d[i]) * point[i] for i in range(len(d)))


def _sample_points(pw, walls, positions_per_class, radius):
    if pw.rank == 1:
        return tuple((p,) for p in positions_per_class[0]) if pw.classes else ()
    trace_sets = [set() for _ in pw.classes]
    for w in walls:
        trace_sets[w.class_index].add(w.trace)
    pts = []
    for raw in itertools.product(range(-radius, radius + 1), repeat=pw.rank):
        pt = tuple(Fraction(x) for x in raw)
        if all(_position(pw, ci, pt) not in trace_sets[ci]
               for ci in range(len(pw.classes))):
            pts.append(pt)
    if not pts:
        pts = [_generic_point(pw, walls, pw.rank)]
    return tuple(pts)


def _canonical_mask(pw, walls, point):
    mask = 0
    pos_cache = {}
    for i, w in enumerate(walls):
        ci = w.class_index
        if ci not in pos_cache:
            pos_cache[ci] = _position(pw, ci, point)
        if pos_cache[ci] > w.trace:
            mask |= 1 << i
    return mask


def _flip_ok(mask, w, bit, below, above, full):
    """Can wall w flip to side ``bit`` without orienting a nested pair away
    from each other?  Forbidden configuration: lower wall on its minus side
    while an upper non-crossing wall is on its plus side."""
    if bit:
        return not (below[w] & full & ~mask)
    return not (above[w] & mask)


def _orientation_bfs(seeds, n_walls, below, above, flippable, max_vertices):
    full = (1 << n_walls) - 1
    seen = set(seeds)
    queue = deque(sorted(seen))
    while queue:
        o = queue.popleft()
        for w in flippable:
            flipped = o ^ (1 << w)
            if flipped in seen:
                continue
            if _flip_ok(flipped, w, flipped >> w & 1, below, above, full):
                seen.add(flipped)
                queue.append(flipped)
                if len(seen) > max_vertices:
                    raise WindowError(
                        f"window dual exceeded {max_vertices} vertices")
    return seen


def window_hull(pw: PeriodicWallspace, radius: int, *,
                max_vertices: int = 200_000) -> WindowHull:
    """Dual cube complex of the wall translates with index in [-radius, radius].

    Walls are materialized along the flat; sample positions are the lattice
    points of the window plus midpoints between consecutive parallel walls,
    and walls separating no two sample positions are dropped.  The dual is
    grown by breadth-first single-wall flips from the canonical orientations
    of the sample points.
    """
    validate(pw)
    if radius < 1:
        raise ValueError(f"window radius must be at least 1, got {radius}")
    walls, spans, positions = _materialize(pw, radius)
    below, above = _constraint_masks(pw, walls)
    samples = _sample_points(pw, walls, positions, radius)
    if not samples:
        raise WindowError("no sample points in the window")
    seed_masks = sorted({_canonical_mask(pw, walls, pt) for pt in samples})
    n_walls = len(walls)
    seen = _orientation_bfs(seed_masks, n_walls, below, above,
                            range(n_walls), max_vertices)
    orientations = tuple(sorted(seen))
    index = {m: v for v, m in enumerate(orientations)}
    edges = []
    for o in orientations:
        for w in range(n_walls):
            flipped = o ^ (1 << w)
            if flipped > o and flipped in seen:
                edges.append((index[o], index[flipped], w))
    complex_ = CubeComplex(len(orientations), edges)
    canonical = {pt: index[_canonical_mask(pw, walls, pt)] for pt in samples}
    return WindowHull(
        wallspace=pw, radius=radius, walls=walls, complex=complex_,
        orientations=orientations, samples=samples, class_span=spans,
        canonical=canonical, wall_index={w.key: i for i, w in enumerate(walls)},
        _below=below, _above=above, _seeds=tuple(seed_masks))


def _restricted_dual(hull: WindowHull, wall_indices):
    """Dual over a subset of the window walls (same constraints, same seeds)."""
    sm = 0
    for i in wall_indices:
        sm |= 1 << i
    below = tuple(b & sm for b in hull._below)
    above = tuple(a & sm for a in hull._above)
    seeds = sorted({s & sm for s in hull._seeds})
    seen = _orientation_bfs(seeds, len(hull.walls), below, above,
                            tuple(wall_indices), 10 ** 7)
    masks = sorted(seen)
    edge_count = 0
    for o in masks:
        for w in wall_indices:
            flipped = o ^ (1 << w)
            if flipped > o and flipped in seen:
                edge_count += 1
    return masks, edge_count, sm


# ---------------------------------------------------------------------------
# quasiline certificates


def quasiline_certificate(pw: PeriodicWallspace, alignment_class, radius: int) -> int:
    """Least w such that, with the class's window walls ordered by trace,
    crossing walls are at most w apart in the order.

    The width is computed at ``radius`` and ``2 * radius``; a stable width
    certifies that the dual of the class is a quasiline.  Raises
    QuasilineFailure when the width grows with the window.
    """
    validate(pw)
    if radius < 1:
        raise ValueError(f"window radius must be at least 1, got {radius}")
    refs = {pw._check_ref(r) for r in alignment_class}
    widths = []
    for r in (radius, 2 * radius):
        walls, _, _ = _materialize(pw, r)
        sub = [w for w in walls if w.orbit in refs]
        sub.sort(key=lambda w: (w.trace, w.class_index, w.rep_index, w.translate))
        width = 0
        for x in range(len(sub)):
            for y in range(x + 1, len(sub)):
                if _walls_cross(pw, sub[x], sub[y]):
                    width = max(width, y - x)
        widths.append(width)
    if widths[0] != widths[1]:
        raise QuasilineFailure(widths[0], widths[1])
    return widths[0]


# ---------------------------------------------------------------------------
# the dichotomy


@dataclass(frozen=True)
class FactorReport:
    alignment_class: tuple
    vertex_count: int
    quasiline_width: int


@dataclass(frozen=True)
class ProductOfQuasilines:
    factors: tuple
    kind = "product-of-quasilines"


@dataclass(frozen=True)
class ExcessClassesWitness:
    alignment_class_count: int
    rank: int
    classes: tuple
    kind = "excess-classes"


@dataclass(frozen=True)
class SemiCrossingWitness:
    pair: tuple
    maximal_class: tuple
    pushoff_k: int | None
    min_displacement: int | None
    kind = "semi-crossing"


@dataclass(frozen=True)
class NonCocompact:
    witness: object
    kind = "non-cocompact"


@dataclass(frozen=True)
class DichotomyReport:
    verdict: object
    window_radius: int
    hull_vertex_count: int
    factor_vertex_counts: tuple

    @property
    def kind(self) -> str:
        return self.verdict.kind


def _maximal_classes(pw, partition):
    """Alignment classes with no class dominating them, under the validated
    class-level semi-crossing order."""

    def class_gt(c1, c2):
        if c1[0][0] != c2[0][0]:
            return False
        return _relation(pw, c1[0][0], c1[0][1], c2[0][1]) == "gt"

    return [c for c in partition
            if not any(class_gt(other, c) for other in partition if other != c)]


def dichotomy(pw: PeriodicWallspace, rank: int, radius: int = 6) -> DichotomyReport:
    """Decide the hull dichotomy at window scale.

    With no semi-crossing pair and exactly ``rank`` alignment classes, the
    windowed hull decomposes as the product of the per-class duals, each
    certified a quasiline: verdict ProductOfQuasilines.  More classes than
    rank, or any semi-crossing pair, witness that the relevant minimal set
    cannot be acted on cocompactly: verdict NonCocompact with an
    ExcessClassesWitness or a SemiCrossingWitness carrying a maximal class
    and push-off displacement evidence.
    """
    validate(pw)
    if not 1 <= rank <= pw.rank:
        raise ValueError(f"rank must be between 1 and {pw.rank}, got {rank}")
    hull = window_hull(pw, radius)
    partition = _alignment_partition(pw)
    semis = _semicrossing_pairs(pw)

    if semis:
        candidates = _maximal_classes(pw, partition)
        involved = [c for c in candidates if any(
            _relation(pw, c[0][0], c[0][1], other[0][1]) in ("gt", "lt")
            for other in partition
            if other != c and other[0][0] == c[0][0])]
        q = min(involved or candidates)
        if 2 <= radius:
            po = pushoff(pw, q, 1, radius)
            k, disp = 1, po.audit.min_canonical_displacement
        else:
            k, disp = None, None
        witness = SemiCrossingWitness(pair=semis[0], maximal_class=q,
                                      pushoff_k=k, min_displacement=disp)
        return DichotomyReport(NonCocompact(witness), radius,
                               hull.complex.n_vertices, ())

    factor_data = []
    for cls in partition:
        refs = set(cls)
        idxs = [i for i, w in enumerate(hull.walls) if w.orbit in refs]
        masks, edge_count, sm = _restricted_dual(hull, idxs)
        factor_data.append((cls, masks, edge_count, sm))
    counts = tuple(len(m) for _, m, _, _ in factor_data)

    if len(partition) != rank:
        if len(partition) < rank:
            raise ValidationError(
                "class-count",
                f"only {len(partition)} alignment classes for rank {rank}; "
                "no lattice of this rank acts on such a flat", None)
        witness = ExcessClassesWitness(len(partition), rank, tuple(partition))
        return DichotomyReport(NonCocompact(witness), radius,
                               hull.complex.n_vertices, counts)

    # product branch: verify hull == product of the per-class duals
    total = 1
    for c in counts:
        total *= c
    if total != hull.complex.n_vertices:
        raise ValidationError(
            "window-product",
            f"hull has {hull.complex.n_vertices} vertices but the alignment "
            f"factors multiply to {total}", None)
    mask_sets = [(set(masks), sm) for _, masks, _, sm in factor_data]
    for m in hull.orientations:
        for mask_set, sm in mask_sets:
            if m & sm not in mask_set:
                raise ValidationError(
                    "window-product",
                    "a hull vertex restricts outside its factor dual", None)
    expected_edges = 0
    for i, (_, masks, edge_count, _) in enumerate(factor_data):
        rest = 1
        for jj, c in enumerate(counts):
            if jj != i:
                rest *= c
        expected_edges += edge_count * rest
    if expected_edges != len(hull.complex.edges):
        raise ValidationError(
            "window-product",
            f"hull has {len(hull.complex.edges)} edges, product predicts "
            f"{expected_edges}", None)

    factors = []
    for cls, masks, _, _ in factor_data:
        width = quasiline_certificate(pw, cls, radius)
        factors.append(FactorReport(cls, len(masks), width))
    return DichotomyReport(ProductOfQuasilines(tuple(factors)), radius,
                           hull.complex.n_vertices, counts)


# ---------------------------------------------------------------------------
# push-off maps


@dataclass(frozen=True)
class PushoffAudit:
    injective: bool
    distance_nonincreasing: bool
    min_canonical_displacement: int | None
    displacement_pairs_checked: int


@dataclass
class PushoffResult:
    k: int
    domain: WindowHull
    codomain: WindowHull
    vertex_map: tuple
    audit: PushoffAudit


def _extension_bit(hull_n: WindowHull, ci: int, trace: Fraction):
    span = hull_n.class_span[ci]
    if span is None:
        raise WindowError(
            f"class {ci} has no sample positions; cannot extend orientations")
    if trace < span[0]:
        return 1
    if trace > span[1]:
        return 0
    raise WindowError(
        f"wall of class {ci} at trace {trace} lies inside the sample span "
        f"[{span[0]}, {span[1]}] but outside the window; the shift escapes "
        "the window")


def _orbit_preserving_shifts(pw: PeriodicWallspace, radius: int):
    """Lattice vectors of the window whose translate shift is integral on
    every class (the vectors acting on the wall data)."""
    shifts = []
    for raw in itertools.product(range(-radius, radius + 1), repeat=pw.rank):
        g = tuple(Fraction(x) for x in raw)
        ok = True
        for ci in range(len(pw.classes)):
            s = _position(pw, ci, g) / pw.classes[ci].period
            if s.denominator != 1:
                ok = False
                break
        if ok:
            shifts.append(g)
    return shifts


def pushoff(pw: PeriodicWallspace, maximal_class, k: int, radius: int) -> PushoffResult:
    """Shift the orientations of a maximal alignment class by k translates.

    The map sends a window-hull vertex to the vertex of the (radius + k)
    window obtained by extending it canonically and reading each shifted
    class wall's orientation off the wall k translates below.  Audits:

      (a) the map is injective on vertices,
      (b) it does not increase distances between any tested pair,
      (c) every canonical vertex lands at distance >= k from every lattice
          shift of itself (skipped when the class has no window walls).

    Any failed audit raises PushoffAuditError: the crossing data cannot come
    from a complex.  Raises WindowError when 2k exceeds the radius or the
    shift needs wall data outside the window.
    """
    validate(pw)
    q = tuple(sorted({pw._check_ref(r) for r in maximal_class}))
    if k < 1:
        raise ValueError(f"shift k must be positive, got {k}")
    if 2 * k > radius:
        raise WindowError(
            f"shift k={k} escapes the window: need k <= radius/2 = {radius / 2}")
    partition = _alignment_partition(pw)
    if q:
        if list(q) not in [sorted(c) for c in partition]:
            raise ValueError(f"{q} is not an alignment class")
        if q not in [tuple(sorted(c)) for c in _maximal_classes(pw, partition)]:
            raise ValueError(
                f"{q} is not maximal for the semi-crossing partial order")
        if len({ci for ci, _ in q}) != 1:
            raise ValueError("an alignment class lies in one parallelism class")

    hull_n = window_hull(pw, radius)
    hull_k = window_hull(pw, radius + k)
    q_set = set(q)

    for key in hull_n.wall_index:
        if key not in hull_k.wall_index:
            raise WindowError(
                f"window wall {key} disappears at radius {radius + k}")

    n_bits = [(hull_n.wall_index.get(w.key), w) for w in hull_k.walls]
    iota_masks = []
    for m in hull_n.orientations:
        ext = 0
        for i, (src, w) in enumerate(n_bits):
            if src is not None:
                bit = m >> src & 1
            else:
                bit = _extension_bit(hull_n, w.class_index, w.trace)
            if bit:
                ext |= 1 << i
        iota_masks.append(ext)

    images = []
    for ext in iota_masks:
        img = ext
        for i, w in enumerate(hull_k.walls):
            if w.orbit not in q_set:
                continue
            src_key = (w.class_index, w.rep_index, w.translate - k)
            if src_key in hull_k.wall_index:
                bit = ext >> hull_k.wall_index[src_key] & 1
            else:
                period = pw.classes[w.class_index].period
                bit = _extension_bit(hull_n, w.class_index, w.trace - k * period)
            if bit:
                img |= 1 << i
            else:
                img &= ~(1 << i)
        images.append(img)

    codomain_index = hull_k.vertex_of_mask
    vertex_map = []
    for v, img in enumerate(images):
        if img not in codomain_index:
            raise PushoffAuditError(
                f"image of vertex {v} is not a consistent orientation; the "
                "input data is not realizable")
        vertex_map.append(codomain_index[img])

    if len(set(vertex_map)) != len(vertex_map):
        raise PushoffAuditError("push-off is not injective on vertices")

    n_vertices = len(hull_n.orientations)
    for x in range(n_vertices):
        mx, ix = hull_n.orientations[x], images[x]
        for y in range(x + 1, n_vertices):
            before = (mx ^ hull_n.orientations[y]).bit_count()
            after = (ix ^ images[y]).bit_count()
            if after > before:
                raise PushoffAuditError(
                    f"push-off increased the distance of vertices {x},{y} "
                    f"from {before} to {after}")

    q_effective = any(w.orbit in q_set for w in hull_k.walls)
    min_disp = None
    pairs = 0
    if q_effective:
        sample_set = set(hull_n.samples)
        shifts = _orbit_preserving_shifts(pw, radius)
        for e in hull_n.samples:
            x = hull_n.canonical[e]
            for g in shifts:
                e2 = tuple(e[i] + g[i] for i in range(pw.rank))
                if e2 not in sample_set:
                    continue
                target = iota_masks[hull_n.canonical[e2]]
                d = (images[x] ^ target).bit_count()
                pairs += 1
                if d < k:
                    raise PushoffAuditError(
                        f"canonical vertex at {e} is pushed only {d} < {k} "
                        f"away from its lattice shift by {g}")
                if min_disp is None or d < min_disp:
                    min_disp = d

    audit = PushoffAudit(injective=True, distance_nonincreasing=True,
                         min_canonical_displacement=min_disp,
                         displacement_pairs_checked=pairs)
    return PushoffResult(k=k, domain=hull_n, codomain=hull_k,
                         vertex_map=tuple(vertex_map), audit=audit)
