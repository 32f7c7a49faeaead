"""Finite CAT(0) cube complexes as median graphs.

A complex is stored as its 1-skeleton: vertices ``0 .. n-1`` and edges
labelled by hyperplane id.  Deleting every edge of one hyperplane splits a
valid complex into exactly two convex halfspaces, so each vertex gets a bit
signature recording its side of every hyperplane.  All operations here
(distance, median, hull, Helly point, thickening, packing multiplicity,
product structure) reduce to integer bit arithmetic on those signatures:

* distance(u, v)  = popcount(sig(u) ^ sig(v))
* median(x, y, z) = vertex whose signature is the bitwise majority
* hull(S)         = vertices agreeing with S on every hyperplane that does
                    not separate S

Cubes of dimension >= 2 are implicit (maximal families of pairwise-crossing
hyperplanes at a vertex) and never stored.  All distances are edge-path
distances on the 1-skeleton.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "CubeComplex",
    "Halfspace",
    "InvalidComplexError",
    "MedianAxiomError",
    "NoCommonPoint",
    "ProductFactor",
    "Thickening",
    "isomorphic",
    "product_complex",
]

# Edge colours for DOT/figure export, keyed by hyperplane id mod len(palette).
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


class InvalidComplexError(ValueError):
    """Edge data that cannot be the 1-skeleton of a CAT(0) cube complex."""


class MedianAxiomError(InvalidComplexError):
    """A vertex triple without a median vertex: the input is not median."""


@dataclass(frozen=True)
class Halfspace:
    """One side of a hyperplane.

    ``side`` is ``"left"`` for the component containing the smallest vertex
    id and ``"right"`` for the other; the choice is a convention, nothing in
    the geometry distinguishes the two sides.
    """

    hyperplane: int
    side: str
    vertices: frozenset

    def __contains__(self, vertex) -> bool:
        return vertex in self.vertices

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class NoCommonPoint:
    """Result of ``helly_point`` when two family members are disjoint.

    Carries the lexicographically first disjoint pair of member indices.
    """

    first: int
    second: int


@dataclass(frozen=True)
class Thickening:
    """Hull of the r-ball around a vertex set.

    ``realized_radius`` is the largest distance from a vertex of the result
    back to the original set; the result always contains the metric r-ball
    and is contained in the realized_radius-ball.
    """

    vertices: frozenset
    radius: int
    realized_radius: int

    def __contains__(self, vertex) -> bool:
        return vertex in self.vertices

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class ProductFactor:
    """One factor of a product decomposition.

    ``hyperplanes`` are the original hyperplane ids in this crossing class,
    ``complex`` is the quotient factor (hyperplanes relabelled 0..k-1 in the
    order of ``hyperplanes``) and ``vertex_map[v]`` is the factor vertex that
    an original vertex v projects to.
    """

    hyperplanes: tuple
    complex: "CubeComplex"
    vertex_map: tuple


class CubeComplex:
    """1-skeleton of a finite CAT(0) cube complex.

    ``edges`` is an iterable of ``(u, v, hyperplane_id)`` triples.  The
    constructor checks only cheap structural facts (simple, connected,
    contiguous hyperplane ids); ``validate()`` performs the full median-graph
    verification.
    """

    def __init__(self, n_vertices: int, edges: Iterable[Sequence[int]]):
        if n_vertices < 1:
            raise InvalidComplexError("a complex needs at least one vertex")
        norm = []
        seen_pairs = set()
        max_h = -1
        for e in edges:
            u, v, h = int(e[0]), int(e[1]), int(e[2])
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise InvalidComplexError(f"edge endpoint out of range: {(u, v, h)}")
            if u == v:
                raise InvalidComplexError(f"self loop at vertex {u}")
            if h < 0:
                raise InvalidComplexError(f"negative hyperplane id {h}")
            if u > v:
                u, v = v, u
            if (u, v) in seen_pairs:
                raise InvalidComplexError(f"duplicate edge between {u} and {v}")
            seen_pairs.add((u, v))
            max_h = max(max_h, h)
            norm.append((u, v, h))
        self.n_vertices = n_vertices
        self.edges = tuple(sorted(norm))
        self.n_hyperplanes = max_h + 1
        used = set(h for _, _, h in self.edges)
        if used != set(range(self.n_hyperplanes)):
            missing = sorted(set(range(self.n_hyperplanes)) - used)
            raise InvalidComplexError(f"hyperplane ids not contiguous, missing {missing}")
        self._adj = None
        self._sig = None
        self._sig_index = None
        self._side_masks = None
        if len(self._component(skip=None)) != n_vertices:
            raise InvalidComplexError("graph is not connected")

    # -- basic structure ---------------------------------------------------

    @property
    def adjacency(self):
        if self._adj is None:
            adj = [[] for _ in range(self.n_vertices)]
            for u, v, h in self.edges:
                adj[u].append((v, h))
                adj[v].append((u, h))
            self._adj = adj
        return self._adj

    def _component(self, skip, start=0):
        """Vertices reachable from ``start`` avoiding edges labelled ``skip``."""
        adj = self.adjacency
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y, h in adj[x]:
                if h != skip and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    @property
    def signatures(self):
        """Per-vertex side bitmask: bit h is set iff the vertex lies on the
        side of hyperplane h away from vertex 0's side-of-smallest-id."""
        if self._sig is None:
            sig = [0] * self.n_vertices
            for h in range(self.n_hyperplanes):
                left = self._component(skip=h, start=0)
                if len(left) == self.n_vertices:
                    raise InvalidComplexError(
                        f"removing hyperplane {h} does not disconnect the graph")
                rest = next(v for v in range(self.n_vertices) if v not in left)
                right = self._component(skip=h, start=rest)
                if len(left) + len(right) != self.n_vertices:
                    raise InvalidComplexError(
                        f"hyperplane {h} splits the graph into more than two parts")
                for u, v, hh in self.edges:
                    if hh == h and ((u in left) == (v in left)):
                        raise InvalidComplexError(
                            f"edge ({u},{v}) of hyperplane {h} does not cross it")
                bit = 1 << h
                for v in right:
                    sig[v] |= bit
            self._sig = sig
            index = {}
            for v, s in enumerate(sig):
                if s in index:
                    raise InvalidComplexError(
                        f"vertices {index[s]} and {v} lie on the same side of "
                        "every hyperplane")
                index[s] = v
            self._sig_index = index
        return self._sig

    @property
    def _signature_index(self):
        self.signatures
        return self._sig_index

    @property
    def side_masks(self):
        """Per-hyperplane bitmask over vertices of the 'right' side."""
        if self._side_masks is None:
            sig = self.signatures
            masks = [0] * self.n_hyperplanes
            for v, s in enumerate(sig):
                bit = 1 << v
                for h in range(self.n_hyperplanes):
                    if s >> h & 1:
                        masks[h] |= bit
            self._side_masks = masks
        return self._side_masks

    def _check_vertex(self, v):
        if not isinstance(v, int) or not 0 <= v < self.n_vertices:
            raise ValueError(f"unknown vertex id {v!r}")
        return v

    def _vertex_set(self, vertices) -> frozenset:
        s = frozenset(self._check_vertex(v) for v in vertices)
        return s

    # -- metric operations ---------------------------------------------------

    def distance(self, u: int, v: int) -> int:
        """Edge-path distance; equals the number of separating hyperplanes."""
        self._check_vertex(u)
        self._check_vertex(v)
        sig = self.signatures
        return (sig[u] ^ sig[v]).bit_count()

    def separating_hyperplanes(self, u: int, v: int) -> tuple:
        self._check_vertex(u)
        self._check_vertex(v)
        diff = self.signatures[u] ^ self.signatures[v]
        return tuple(h for h in range(self.n_hyperplanes) if diff >> h & 1)

    def median(self, x: int, y: int, z: int) -> int:
        """The unique vertex on geodesics between each pair of x, y, z."""
        sig = self.signatures
        sx, sy, sz = sig[self._check_vertex(x)], sig[self._check_vertex(y)], sig[self._check_vertex(z)]
        maj = (sx & sy) | (sx & sz) | (sy & sz)
        try:
            return self._signature_index[maj]
        except KeyError:
            raise MedianAxiomError(
                f"triple ({x},{y},{z}) has no median vertex; "
                "the complex is malformed") from None

    # -- convexity ----------------------------------------------------------

    def hull(self, vertices: Iterable[int]) -> frozenset:
        """Smallest convex vertex set containing ``vertices``.

        Computed as the intersection of all halfspaces containing the input.
        """
        s = self._vertex_set(vertices)
        if not s:
            raise ValueError("hull of an empty vertex set")
        sig = self.signatures
        and_all = or_all = sig[next(iter(s))]
        for v in s:
            and_all &= sig[v]
            or_all |= sig[v]
        full = (1 << self.n_hyperplanes) - 1
        agree = full & ~(and_all ^ or_all)
        return frozenset(v for v in range(self.n_vertices)
                         if not (sig[v] ^ and_all) & agree)

    def is_convex(self, vertices: Iterable[int]) -> bool:
        s = self._vertex_set(vertices)
        if not s:
            raise ValueError("convexity of an empty vertex set")
        return self.hull(s) == s

    def halfspace(self, hyperplane: int, side: str = "left") -> Halfspace:
        if not 0 <= hyperplane < self.n_hyperplanes:
            raise ValueError(f"unknown hyperplane id {hyperplane!r}")
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        sig = self.signatures
        want = 1 if side == "right" else 0
        verts = frozenset(v for v in range(self.n_vertices)
                          if (sig[v] >> hyperplane & 1) == want)
        return Halfspace(hyperplane, side, verts)

    def halfspaces(self) -> Iterator[Halfspace]:
        for h in range(self.n_hyperplanes):
            yield self.halfspace(h, "left")
            yield self.halfspace(h, "right")

    def helly_point(self, family: Sequence[Iterable[int]]):
        """Common vertex of pairwise-intersecting convex sets.

        Returns the common vertex with smallest id, or ``NoCommonPoint``
        naming the lexicographically first disjoint pair.  Every member must
        be convex and nonempty.
        """
        members = [self._vertex_set(m) for m in family]
        if not members:
            raise ValueError("empty family")
        for i, m in enumerate(members):
            if not m:
                raise ValueError(f"family member {i} is empty")
            if not self.is_convex(m):
                raise ValueError(f"family member {i} is not convex")
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if not members[i] & members[j]:
                    return NoCommonPoint(i, j)
        common = frozenset.intersection(*members)
        if not common:
            raise MedianAxiomError(
                "pairwise-intersecting convex sets with empty total "
                "intersection: the complex is malformed")
        return min(common)

    def ball(self, vertices: Iterable[int], radius: int) -> frozenset:
        s = self._vertex_set(vertices)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        dist = self._distances_from(s)
        return frozenset(v for v in range(self.n_vertices) if dist[v] <= radius)

    def _distances_from(self, sources):
        adj = self.adjacency
        dist = [-1] * self.n_vertices
        queue = deque()
        for v in sources:
            dist[v] = 0
            queue.append(v)
        while queue:
            x = queue.popleft()
            for y, _ in adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def thicken(self, vertices: Iterable[int], radius: int) -> Thickening:
        """Hull of the radius-ball around a vertex set.

        The result is convex, contains the metric radius-neighborhood, and
        sits inside the realized_radius-neighborhood.
        """
        s = self._vertex_set(vertices)
        if not s:
            raise ValueError("thicken of an empty vertex set")
        hull = self.hull(self.ball(s, radius))
        dist = self._distances_from(s)
        realized = max(dist[v] for v in hull)
        return Thickening(hull, radius, realized)

    def packing_number(self, translates: Sequence[Iterable[int]], radius: int) -> int:
        """Maximum multiplicity of the r-thickened translates at a vertex.

        Equals the size of the largest subfamily whose thickenings pairwise
        intersect, by the Helly property.
        """
        if not translates:
            raise ValueError("empty list of translates")
        thick = []
        for i, t in enumerate(translates):
            s = self._vertex_set(t)
            if not s:
                raise ValueError(f"translate {i} is empty")
            if not self.is_convex(s):
                raise ValueError(f"translate {i} is not convex")
            thick.append(self.thicken(s, radius).vertices)
        counts = [0] * self.n_vertices
        for t in thick:
            for v in t:
                counts[v] += 1
        return max(counts)

    # -- product structure ---------------------------------------------------

    def crossing(self, h1: int, h2: int) -> bool:
        """True iff the two hyperplanes cross (all four side pairs occur)."""
        if h1 == h2:
            return False
        masks = self.side_masks
        full = (1 << self.n_vertices) - 1
        a1, a0 = masks[h1], full & ~masks[h1]
        b1, b0 = masks[h2], full & ~masks[h2]
        return bool(a1 & b1) and bool(a1 & b0) and bool(a0 & b1) and bool(a0 & b0)

    def product_decomposition(self) -> list:
        """Finest partition of hyperplanes into classes that pairwise cross.

        Classes are the connected components of the non-crossing relation;
        each yields a quotient factor complex.  For an exact product the
        factor vertex counts multiply to the vertex count of the complex.
        """
        n_h = self.n_hyperplanes
        parent = list(range(n_h))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for h1 in range(n_h):
            for h2 in range(h1 + 1, n_h):
                if not self.crossing(h1, h2):
                    ra, rb = find(h1), find(h2)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        groups = {}
        for h in range(n_h):
            groups.setdefault(find(h), []).append(h)
        classes = sorted(groups.values())

        sig = self.signatures
        factors = []
        for cls in classes:
            mask = 0
            for h in cls:
                mask |= 1 << h
            rsigs = [sig[v] & mask for v in range(self.n_vertices)]
            verts = sorted(set(rsigs))
            index = {s: i for i, s in enumerate(verts)}
            vmap = tuple(index[s] for s in rsigs)
            hmap = {h: i for i, h in enumerate(cls)}
            fedges = set()
            for u, v, h in self.edges:
                if h in hmap:
                    a, b = vmap[u], vmap[v]
                    fedges.add((min(a, b), max(a, b), hmap[h]))
            factor = CubeComplex(len(verts), sorted(fedges))
            factors.append(ProductFactor(tuple(cls), factor, vmap))
        return factors

    # -- validation ----------------------------------------------------------

    def validate(self, median_limit: int = 5000) -> "CubeComplex":
        """Full median-graph verification.

        Checks bipartiteness, the two-sided convex-halfspace structure of
        every hyperplane, distance = number of separating hyperplanes for all
        vertex pairs, and (below ``median_limit`` vertices, since it is cubic
        in the vertex count) existence of the median of every triple.
        Raises InvalidComplexError / MedianAxiomError on failure.
        """
        color = [-1] * self.n_vertices
        color[0] = 0
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y, _ in self.adjacency[x]:
                if color[y] < 0:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    raise InvalidComplexError("graph is not bipartite")

        sig = self.signatures  # forces the per-hyperplane split checks

        per_vertex = [set() for _ in range(self.n_vertices)]
        for u, v, h in self.edges:
            for w in (u, v):
                if h in per_vertex[w]:
                    raise InvalidComplexError(
                        f"vertex {w} has two edges of hyperplane {h}")
                per_vertex[w].add(h)

        for u in range(self.n_vertices):
            dist = self._distances_from([u])
            for v in range(u + 1, self.n_vertices):
                if dist[v] != (sig[u] ^ sig[v]).bit_count():
                    raise InvalidComplexError(
                        f"distance({u},{v}) = {dist[v]} but {((sig[u] ^ sig[v]).bit_count())} "
                        "hyperplanes separate them")

        if self.n_vertices <= median_limit:
            index = self._signature_index
            sigs = self.signatures
            for i in range(self.n_vertices):
                si = sigs[i]
                for j in range(i + 1, self.n_vertices):
                    sj = sigs[j]
                    base = si & sj
                    diff = si ^ sj
                    for sk in sigs:
                        if (base | (sk & diff)) not in index:
                            raise MedianAxiomError(
                                f"no median for a triple containing vertices {i},{j}")
        return self

    # -- builders and serialization -------------------------------------------

    @classmethod
    def grid(cls, m: int, n: int) -> "CubeComplex":
        """m x n grid of vertices; vertex (x, y) has id x*n + y.

        Vertical hyperplanes 0..m-2 sit between columns, horizontal ones
        m-1..m+n-3 between rows.
        """
        if m < 1 or n < 1:
            raise ValueError("grid needs positive dimensions")
        edges = []
        for x in range(m):
            for y in range(n):
                v = x * n + y
                if x + 1 < m:
                    edges.append((v, (x + 1) * n + y, x))
                if y + 1 < n:
                    edges.append((v, v + 1, (m - 1) + y))
        return cls(m * n, edges)

    def to_json_dict(self) -> dict:
        return {"vertices": self.n_vertices,
                "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CubeComplex":
        try:
            n = data["vertices"]
            edges = data["edges"]
        except (KeyError, TypeError):
            raise InvalidComplexError(
                'cube complex JSON needs "vertices" and "edges"') from None
        return cls(n, edges)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_dot(self) -> str:
        lines = ["graph cube_complex {", "  node [shape=point];"]
        for v in range(self.n_vertices):
            lines.append(f"  {v};")
        for u, v, h in self.edges:
            color = PALETTE[h % len(PALETTE)]
            lines.append(f'  {u} -- {v} [color="{color}", label="{h}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- dunder -------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, CubeComplex)
                and self.n_vertices == other.n_vertices
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.n_vertices, self.edges))

    def __repr__(self):
        return (f"CubeComplex(vertices={self.n_vertices}, "
                f"edges={len(self.edges)}, hyperplanes={self.n_hyperplanes})")


def product_complex(factors: Sequence[CubeComplex]) -> CubeComplex:
    """Direct product of complexes; hyperplane ids are stacked factor by factor."""
    if not factors:
        raise ValueError("empty factor list")
    tuples = list(itertools.product(*[range(f.n_vertices) for f in factors]))
    index = {t: i for i, t in enumerate(tuples)}
    offsets = []
    total = 0
    for f in factors:
        offsets.append(total)
        total += f.n_hyperplanes
    edges = []
    for i, f in enumerate(factors):
        for u, v, h in f.edges:
            for t in tuples:
                if t[i] == u:
                    s = list(t)
                    s[i] = v
                    edges.append((index[t], index[tuple(s)], offsets[i] + h))
    return CubeComplex(len(tuples), edges)


def isomorphic(a: CubeComplex, b: CubeComplex) -> bool:
    """Graph isomorphism of 1-skeletons.

    For median graphs this is the right notion: hyperplanes are the
    Djokovic-Winkler classes of the underlying graph, so any graph
    isomorphism matches them up automatically.
    """
    if (a.n_vertices != b.n_vertices or len(a.edges) != len(b.edges)
            or a.n_hyperplanes != b.n_hyperplanes):
        return False
    deg_a = sorted(len(x) for x in a.adjacency)
    deg_b = sorted(len(x) for x in b.adjacency)
    if deg_a != deg_b:
        return False
    sides_a = sorted(m.bit_count() for m in a.side_masks)
    sides_b = sorted(m.bit_count() for m in b.side_masks)
    if sides_a != sides_b:
        return False
    import networkx as nx

    ga = nx.Graph([(u, v) for u, v, _ in a.edges])
    gb = nx.Graph([(u, v) for u, v, _ in b.edges])
    ga.add_nodes_from(range(a.n_vertices))
    gb.add_nodes_from(range(b.n_vertices))
    return nx.is_isomorphic(ga, gb)
