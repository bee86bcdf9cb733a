"""Median graphs: recognition, edge halfspaces, wall coordinates, and the
cube complex obtained by filling hypercube skeletons.

A connected simple graph is median when its path metric is a median
metric.  Certification derives the wall structure from the edge
halfspaces H(x,y) = {z : d(z,x) < d(z,y)} and checks that the wall count
between any two vertices equals their path distance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import InputError, InternalCheckError
from .metric import FiniteMetric, MedianMetric

Vertex = Hashable

HALFSPACE_CHECK_CAP = 16


class SimpleGraph:
    """Connected graph, no loops, no multi-edges."""

    def __init__(self, vertices: Sequence[Vertex],
                 edges: Iterable[tuple[Vertex, Vertex]]):
        vs = list(vertices)
        if not vs:
            raise InputError("a graph needs at least one vertex")
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertex identifiers")
        self.vertices = vs
        self._index = {v: i for i, v in enumerate(vs)}
        n = len(vs)
        adj: list[set[int]] = [set() for _ in range(n)]
        canon = set()
        for u, v in edges:
            if u not in self._index or v not in self._index:
                raise InputError(f"edge ({u!r},{v!r}) references an unknown vertex")
            i, j = self._index[u], self._index[v]
            if i == j:
                raise InputError(f"loop at {u!r}")
            key = (min(i, j), max(i, j))
            if key in canon:
                continue
            canon.add(key)
            adj[i].add(j)
            adj[j].add(i)
        self.edge_indices = sorted(canon)
        self._adj = [sorted(s) for s in adj]
        if self._component(0) != (1 << n) - 1:
            raise InputError("graph is not connected")
        self._dist: list[list[int]] | None = None

    def _component(self, start: int) -> int:
        seen = 1 << start
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if not seen >> w & 1:
                    seen |= 1 << w
                    queue.append(w)
        return seen

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return [self.vertices[i] for i in self._adj[self.index(v)]]

    @property
    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return [(self.vertices[i], self.vertices[j]) for i, j in self.edge_indices]

    def bfs_distances(self, start: int) -> list[int]:
        n = len(self.vertices)
        dist = [-1] * n
        dist[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            du = dist[u]
            for w in self._adj[u]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    queue.append(w)
        return dist

    def all_pairs(self) -> list[list[int]]:
        if self._dist is None:
            self._dist = [self.bfs_distances(i) for i in range(len(self.vertices))]
        return self._dist

    def path_metric(self) -> FiniteMetric:
        return FiniteMetric(self.vertices, self.all_pairs())


@dataclass(frozen=True)
class GraphWall:
    """A wall of a median graph: the canonical side contains vertex 0."""

    side: frozenset
    complement: frozenset
    crossing_edges: tuple[tuple[Vertex, Vertex], ...]
    side_mask: int = field(repr=False, default=0)


class MedianGraphCert:
    """Certificate produced by :func:`certify_median_graph`."""

    def __init__(self, graph: SimpleGraph, metric: MedianMetric,
                 walls: list[GraphWall], coords: list[int],
                 bipartition: tuple[frozenset, frozenset],
                 halfspaces_exhaustively_checked: bool):
        self.graph = graph
        self.metric = metric
        self.walls = walls
        self._coords = coords      # wall-coordinate bitvector per vertex index
        self.bipartition = bipartition
        self.halfspaces_exhaustively_checked = halfspaces_exhaustively_checked

    @property
    def vertices(self) -> list[Vertex]:
        return self.graph.vertices

    def dist(self, u: Vertex, v: Vertex) -> int:
        return self.graph.all_pairs()[self.graph.index(u)][self.graph.index(v)]

    def median(self, u: Vertex, v: Vertex, w: Vertex) -> Vertex:
        return self.metric.median_point(u, v, w)

    def coordinate_int(self, v: Vertex, base: Vertex | None = None) -> int:
        bits = self._coords[self.graph.index(v)]
        if base is not None:
            bits ^= self._coords[self.graph.index(base)]
        return bits

    def wall_coordinates(self, base: Vertex | None = None) -> dict[Vertex, tuple[int, ...]]:
        """Per-vertex wall-side indicators, zeroed at the base vertex.
        Hamming distance between two coordinate vectors equals path distance.
        """
        w = len(self.walls)
        return {
            v: tuple(self.coordinate_int(v, base) >> k & 1 for k in range(w))
            for v in self.vertices
        }


def certify_median_graph(g: SimpleGraph,
                         halfspace_check_cap: int = HALFSPACE_CHECK_CAP) -> MedianGraphCert:
    """Certify a connected graph as median, or raise NotMedianError with a
    counterexample triple.

    On success the certificate also carries the wall structure, and the
    following theorem-backed facts are re-checked (failure raises
    InternalCheckError): bipartiteness, convexity of both sides of every
    edge halfspace, and agreement of path distance with the number of
    separating walls.  Up to ``halfspace_check_cap`` vertices, all
    halfspaces are enumerated and checked to arise from edges.
    """
    metric = MedianMetric.certify(g.path_metric())   # raises NotMedianError
    n = len(g.vertices)
    dist = g.all_pairs()

    colour = dist[0]
    for i, j in g.edge_indices:
        if (colour[i] + colour[j]) % 2 == 0:
            raise InternalCheckError("median graph failed bipartiteness")
    even = frozenset(g.vertices[i] for i in range(n) if colour[i] % 2 == 0)
    odd = frozenset(g.vertices[i] for i in range(n) if colour[i] % 2 == 1)

    full = (1 << n) - 1
    by_side: dict[int, list[tuple[int, int]]] = {}
    for i, j in g.edge_indices:
        side_i = 0
        for z in range(n):
            if dist[z][i] < dist[z][j]:
                side_i |= 1 << z
            elif dist[z][i] == dist[z][j]:
                raise InternalCheckError(
                    f"tied edge halfspace at ({g.vertices[i]!r},{g.vertices[j]!r})")
        canon = side_i if side_i & 1 else full & ~side_i
        by_side.setdefault(canon, []).append((i, j))

    betw = metric._between()

    def convex(mask: int) -> bool:
        members = [t for t in range(n) if mask >> t & 1]
        return all(not betw[a][b] & ~mask for a in members for b in members)

    walls: list[GraphWall] = []
    order = sorted(by_side, key=lambda m: tuple(t for t in range(n) if m >> t & 1))
    for canon in order:
        co = full & ~canon
        if not (convex(canon) and convex(co)):
            raise InternalCheckError("edge halfspace with a non-convex side")
        walls.append(GraphWall(
            side=frozenset(g.vertices[t] for t in range(n) if canon >> t & 1),
            complement=frozenset(g.vertices[t] for t in range(n) if co >> t & 1),
            crossing_edges=tuple((g.vertices[i], g.vertices[j])
                                 for i, j in sorted(by_side[canon])),
            side_mask=canon,
        ))

    coords = [0] * n
    for k, wall in enumerate(walls):
        for t in range(n):
            if not wall.side_mask >> t & 1:
                coords[t] |= 1 << k
    base = coords[0]
    coords = [c ^ base for c in coords]
    for a in range(n):
        for b in range(a + 1, n):
            if (coords[a] ^ coords[b]).bit_count() != dist[a][b]:
                raise InternalCheckError(
                    "wall metric disagrees with path metric at "
                    f"({g.vertices[a]!r},{g.vertices[b]!r})")

    checked_all = n <= halfspace_check_cap
    if checked_all:
        wall_sides = {w.side_mask for w in walls}
        for rest in range(1 << (n - 1)):
            side = (rest << 1) | 1
            if side == full:
                continue
            if convex(side) and convex(full & ~side):
                if side not in wall_sides:
                    raise InternalCheckError(
                        "a proper halfspace does not come from an edge")
                wall_sides.discard(side)
        if wall_sides:
            raise InternalCheckError("an edge halfspace was not convex-enumerable")

    return MedianGraphCert(g, metric, walls, coords, (even, odd), checked_all)


def edge_halfspaces(cert: MedianGraphCert) -> list[GraphWall]:
    """The deduplicated walls; each pair's distance equals the number of
    walls separating it (checked at certification time)."""
    return list(cert.walls)


@dataclass(frozen=True)
class CubeComplex:
    """Cubes by dimension; each k-cube is the vertex set of an induced
    k-hypercube, and the family is closed under the filling rule: a cube
    is present as soon as all its vertices are."""

    cubes: dict[int, list[frozenset]]

    def counts(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.cubes.items())}

    @property
    def dimension(self) -> int:
        return max(self.cubes) if self.cubes else 0


def fill_cubes(cert: MedianGraphCert, max_dim: int | None = None) -> CubeComplex:
    """Detect cubes through wall coordinates: a k-cube is a set of 2^k
    vertices realizing all orientations of k pairwise-crossing walls with
    every other wall fixed.  Built level by level, so the (k+1)-level is
    complete whenever its k-skeletons are.
    """
    if max_dim is not None and max_dim < 1:
        raise InputError("max_dim must be >= 1")
    n = len(cert.vertices)
    nwalls = len(cert.walls)
    coords = [cert.coordinate_int(v) for v in cert.vertices]
    by_coord = {c: i for i, c in enumerate(coords)}
    if len(by_coord) != n:
        raise InternalCheckError("wall coordinates are not injective")

    # level k maps (fixed coordinate part, varying wall mask) -> present
    level: dict[tuple[int, int], None] = {}
    for i, j in cert.graph.edge_indices:
        x = coords[i] ^ coords[j]
        level[(coords[i] & ~x, x)] = None
    out: dict[int, list[frozenset]] = {}
    dim = 1
    while level and (max_dim is None or dim <= max_dim):
        sets = []
        for fix, varying in level:
            bits = [b for b in range(nwalls) if varying >> b & 1]
            members = []
            for choice in range(1 << dim):
                c = fix
                for pos, b in enumerate(bits):
                    if choice >> pos & 1:
                        c |= 1 << b
                members.append(cert.vertices[by_coord[c]])
            sets.append(frozenset(members))
        out[dim] = sorted(sets, key=lambda s: sorted(map(str, s)))
        nxt: dict[tuple[int, int], None] = {}
        for fix, varying in level:
            top = varying.bit_length()
            for w in range(top, nwalls):
                bw = 1 << w
                if fix & bw:
                    continue
                if (fix | bw, varying) in level:
                    nxt[(fix, varying | bw)] = None
        level = nxt
        dim += 1
    return CubeComplex(out)


def wall_coordinates(cert: MedianGraphCert,
                     base: Vertex) -> dict[Vertex, tuple[int, ...]]:
    """Vertex -> wall-side bit vector, XOR-normalized so base maps to 0."""
    return cert.wall_coordinates(base)
