"""Integer sublattice arithmetic and the commensurability obstruction.

Sublattices of Z^p are canonicalized by row-style Hermite normal form (basis
vectors as rows, pivots positive, entries above a pivot reduced modulo it),
which makes lattice equality a tuple comparison.  Intersections come from the
integer kernel of a stacked basis matrix, and commensurability of two
sublattices means both have the rank of their intersection, i.e. equal
rational spans.

``obstruction`` counts commensurability classes among a family of rank-k
sublattices of Z^p against the threshold C(p, k) + 1: a free-abelian group of
rank p has only C(p, k) commensurability classes of rank-k factor directions
available, so meeting the threshold certifies that no proper cocompact action
on a CAT(0) cube complex exists.  The ambient subgroups being *highest* is a
group-theoretic hypothesis that lattice data cannot express; reports carry it
explicitly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "ObstructionReport",
    "PresentationSyntaxError",
    "NonPrimitiveVectorError",
    "Sublattice",
    "TubularPresentation",
    "commensurable",
    "hnf",
    "intersect",
    "obstruction",
    "parse_presentation",
    "tubular_obstruction",
]

HIGHEST_HYPOTHESIS = (
    "the ambient free-abelian subgroups are assumed highest; "
    "this is not decidable from the lattice data")


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonPrimitiveVectorError(ValueError):
    """An edge vector whose entries have a common factor (or all zero)."""


@dataclass(frozen=True)
class Sublattice:
    """Integer sublattice of Z^p in Hermite normal form (basis rows)."""

    ambient_rank: int
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence[int]) -> bool:
        v = [int(x) for x in vector]
        if len(v) != self.ambient_rank:
            raise ValueError(
                f"vector has length {len(v)}, ambient rank is {self.ambient_rank}")
        for row in self.basis:
            c = _pivot_column(row)
            if v[c] % row[c]:
                return False
            q = v[c] // row[c]
            for i in range(self.ambient_rank):
                v[i] -= q * row[i]
        return not any(v)

    def to_json_dict(self) -> dict:
        return {"ambient_rank": self.ambient_rank,
                "basis": [list(r) for r in self.basis]}

    def __repr__(self):
        rows = ", ".join(str(list(r)) for r in self.basis)
        return f"Sublattice(Z^{self.ambient_rank}, [{rows}])"


def _pivot_column(row):
    for i, x in enumerate(row):
        if x:
            return i
    raise ValueError("zero row has no pivot")


def _xgcd(a, b):
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def _row_echelon(rank, vectors, track=False):
    """Integer row echelon form via gcd row operations.

    Each input row either becomes a pivot row (leading entry in a column no
    other pivot occupies) or reduces to zero.  With ``track`` the unimodular
    combination of inputs producing each final row is recorded, so the zero
    rows give an integer kernel basis.

    Returns (rows, transform, pivots) with pivots a sorted list of
    (pivot_column, row_index) pairs.
    """
    rows = [[int(x) for x in v] for v in vectors]
    for i, r in enumerate(rows):
        if len(r) != rank:
            raise ValueError(f"vector {i} has length {len(r)}, expected {rank}")
    n = len(rows)
    trans = [[1 if i == j else 0 for j in range(n)] for i in range(n)] \
        if track else None
    pivot_of_col = {}
    for idx in range(n):
        while True:
            row = rows[idx]
            lead = next((c for c in range(rank) if row[c]), None)
            if lead is None:
                break
            p = pivot_of_col.get(lead)
            if p is None:
                pivot_of_col[lead] = idx
                break
            # both rows vanish before ``lead``, so combining keeps echelon shape
            a, b = rows[p][lead], row[lead]
            if b % a == 0:
                q = b // a
                rows[idx] = [row[i] - q * rows[p][i] for i in range(rank)]
                if track:
                    trans[idx] = [trans[idx][i] - q * trans[p][i] for i in range(n)]
            else:
                g, x, y = _xgcd(a, b)
                pa, pb = a // g, b // g
                old = rows[p]
                rows[p] = [x * old[i] + y * row[i] for i in range(rank)]
                rows[idx] = [-pb * old[i] + pa * row[i] for i in range(rank)]
                if track:
                    old_t = trans[p]
                    trans[p] = [x * old_t[i] + y * trans[idx][i] for i in range(n)]
                    trans[idx] = [-pb * old_t[i] + pa * trans[idx][i]
                                  for i in range(n)]
    pivots = sorted((col, idx) for col, idx in pivot_of_col.items())
    return rows, trans, pivots


def hnf(rank: int, vectors: Iterable[Sequence[int]]) -> Sublattice:
    """Hermite normal form of the integer span of ``vectors``.

    Canonical: idempotent and independent of generator order, so two
    generating sets span the same lattice exactly when their forms agree.
    """
    if rank < 0:
        raise ValueError("ambient rank must be nonnegative")
    rows, _, basis = _row_echelon(rank, list(vectors))
    echelon = [rows[idx] for _, idx in basis]
    # normalize: positive pivots, entries above a pivot reduced into [0, pivot)
    for r in range(len(echelon)):
        c = _pivot_column(echelon[r])
        if echelon[r][c] < 0:
            echelon[r] = [-x for x in echelon[r]]
    for r in range(len(echelon)):
        c = _pivot_column(echelon[r])
        for above in range(r):
            q = echelon[above][c] // echelon[r][c]
            if q:
                echelon[above] = [echelon[above][i] - q * echelon[r][i]
                                  for i in range(rank)]
    return Sublattice(rank, tuple(tuple(r) for r in echelon))


def span_of(rank: int, *vectors) -> Sublattice:
    return hnf(rank, vectors)


def intersect(l1: Sublattice, l2: Sublattice) -> Sublattice:
    """Lattice of vectors lying in both sublattices."""
    if l1.ambient_rank != l2.ambient_rank:
        raise ValueError(
            f"ambient ranks differ: {l1.ambient_rank} vs {l2.ambient_rank}")
    rank = l1.ambient_rank
    stacked = list(l1.basis) + list(l2.basis)
    if not l1.basis or not l2.basis:
        return hnf(rank, [])
    rows, trans, basis = _row_echelon(rank, stacked, track=True)
    pivot_rows = {idx for _, idx in basis}
    generators = []
    for idx in range(len(stacked)):
        if idx in pivot_rows or any(rows[idx]):
            continue
        coeffs = trans[idx][:len(l1.basis)]
        vec = [0] * rank
        for c, row in zip(coeffs, l1.basis):
            for i in range(rank):
                vec[i] += c * row[i]
        generators.append(vec)
    return hnf(rank, generators)


def commensurable(l1: Sublattice, l2: Sublattice) -> bool:
    """True iff the intersection has finite index in both, i.e. both lattices
    and their intersection share one rank (equal rational spans)."""
    if l1.ambient_rank != l2.ambient_rank:
        raise ValueError(
            f"ambient ranks differ: {l1.ambient_rank} vs {l2.ambient_rank}")
    if l1.rank != l2.rank:
        return False
    return intersect(l1, l2).rank == l1.rank


@dataclass(frozen=True)
class ObstructionReport:
    ambient_rank: int
    intersection_rank: int
    classes: tuple            # tuples of input indices, one per class
    representatives: tuple    # one Sublattice per class
    threshold: int
    fired: bool
    assumed_hypotheses: tuple

    def to_json_dict(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "intersection_rank": self.intersection_rank,
            "classes": [list(c) for c in self.classes],
            "representatives": [r.to_json_dict() for r in self.representatives],
            "threshold": self.threshold,
            "fired": self.fired,
            "assumed_hypotheses": list(self.assumed_hypotheses),
        }


def obstruction(intersections: Sequence[Sublattice], p: int, k: int,
                extra_hypotheses: Iterable[str] = ()) -> ObstructionReport:
    """Count commensurability classes against the threshold C(p, k) + 1.

    ``fired`` means the family cannot arise as intersections with a single
    highest rank-p free-abelian subgroup of a cocompactly cubulated group.
    Adding lattices never unfires the report.
    """
    if k < 1 or k > p:
        raise ValueError(f"intersection rank k={k} must be within 1..{p}")
    for i, lat in enumerate(intersections):
        if lat.ambient_rank != p:
            raise ValueError(f"lattice {i} has ambient rank {lat.ambient_rank}, "
                             f"expected {p}")
        if lat.rank != k:
            raise ValueError(f"lattice {i} has rank {lat.rank}, expected {k}")
    classes = []
    reps = []
    for i, lat in enumerate(intersections):
        for ci, rep in enumerate(reps):
            if commensurable(rep, lat):
                classes[ci].append(i)
                break
        else:
            classes.append([i])
            reps.append(lat)
    threshold = math.comb(p, k) + 1
    return ObstructionReport(
        ambient_rank=p, intersection_rank=k,
        classes=tuple(tuple(c) for c in classes),
        representatives=tuple(reps), threshold=threshold,
        fired=len(classes) >= threshold,
        assumed_hypotheses=(HIGHEST_HYPOTHESIS, *extra_hypotheses))


# ---------------------------------------------------------------------------
# multiple HNN extensions of Z^p with cyclic edge groups


@dataclass(frozen=True)
class TubularPresentation:
    """Z^p with stable letters t_k conjugating the cyclic group on b_k to the
    cyclic group on c_k."""

    rank: int
    edges: tuple   # (name, b, c) with b, c primitive integer vectors

    def __init__(self, rank: int, edges: Iterable):
        rank = int(rank)
        norm = []
        for name, b, c in edges:
            b = tuple(int(x) for x in b)
            c = tuple(int(x) for x in c)
            for v in (b, c):
                if len(v) != rank:
                    raise ValueError(
                        f"edge {name}: vector {v} has length {len(v)}, "
                        f"expected {rank}")
                _check_primitive(v, name)
            norm.append((str(name), b, c))
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "edges", tuple(norm))


def _check_primitive(v, context):
    g = math.gcd(*(abs(x) for x in v)) if v else 0
    if g != 1:
        raise NonPrimitiveVectorError(
            f"{context}: vector {tuple(v)} is not primitive (gcd {g})")


def tubular_obstruction(pres: TubularPresentation) -> ObstructionReport:
    """Run the obstruction on the cyclic subgroups carried by the edges.

    The stable-letter conjugates of Z^p meet it in the cyclic groups on the
    edge vectors, so every b_k and c_k contributes a rank-1 sublattice.
    """
    directions = []
    for _, b, c in pres.edges:
        directions.append(hnf(pres.rank, [b]))
        directions.append(hnf(pres.rank, [c]))
    return obstruction(
        directions, pres.rank, 1,
        extra_hypotheses=(
            "the edge-group directions are taken to be the intersections of "
            "the stable-letter conjugates with the vertex group",))


_RANK_RE = re.compile(r"rank\s+(\d+)\s*$")
_EDGE_RE = re.compile(
    r"edge\s+(\w+)\s*:\s*(\([^)]*\))\s*->\s*(\([^)]*\))\s*$")
_VEC_RE = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)$")


def parse_presentation(text: str) -> TubularPresentation:
    """Parse the text format::

        rank 3
        edge t1: (2,1,0) -> (0,0,1)

    Lines starting with ``#`` and blank lines are ignored.  Raises
    PresentationSyntaxError with line/column on malformed input and
    NonPrimitiveVectorError for edge vectors with a common factor.
    """
    rank = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if rank is None:
            m = _RANK_RE.match(line)
            if not m:
                raise PresentationSyntaxError(
                    'expected "rank <p>" as the first statement', lineno,
                    raw.index(line[0]) + 1)
            rank = int(m.group(1))
            continue
        m = _EDGE_RE.match(line)
        if not m:
            col = raw.index(line[0]) + 1
            raise PresentationSyntaxError(
                'expected "edge <name>: (..) -> (..)"', lineno, col)
        name = m.group(1)
        vectors = []
        for group_index in (2, 3):
            vec_text = m.group(group_index)
            vm = _VEC_RE.match(vec_text)
            if not vm:
                col = raw.find(vec_text) + 1
                raise PresentationSyntaxError(
                    f"malformed vector {vec_text!r}", lineno, col)
            vectors.append(tuple(int(x) for x in vm.group(1).split(",")))
        edges.append((name, vectors[0], vectors[1]))
    if rank is None:
        raise PresentationSyntaxError('missing "rank <p>" line', 1, 1)
    return TubularPresentation(rank, edges)
