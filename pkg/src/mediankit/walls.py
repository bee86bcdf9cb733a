"""Spaces with walls, the wall metric, and the cubulation into a median
graph.

A wall is a two-part partition of the point set; the trivial wall
{empty, X} is always present.  The cubulation's vertices are consistent
orientations (a chosen side per wall, any two chosen sides meeting),
reached from the principal orientations sigma_x by single-wall flips;
edges join orientations differing on exactly one wall.
"""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, InternalCheckError, ResourceLimitError
from .graphs import MedianGraphCert, SimpleGraph, certify_median_graph

Point = Hashable

DEFAULT_WALL_CAP = 24
DEFAULT_VERTEX_CAP = 65536
DEFAULT_CERTIFY_CAP = 300
DEFAULT_CLOSURE_CAP = 600
DEFAULT_DISTANCE_CHECK_CAP = 2048


class WallSpace:
    """Finite point set plus walls; any two points separated by >= 1 wall.

    Nontrivial walls are stored in a canonical order (lexicographic on the
    side containing the first point); the trivial wall is always present
    and never stored explicitly.
    """

    def __init__(self, points: Sequence[Point],
                 walls: Iterable[tuple[Iterable[Point], Iterable[Point]]],
                 *, warn_missing_trivial: bool = False):
        pts = list(points)
        if not pts:
            raise InputError("a wall space needs at least one point")
        if len(set(pts)) != len(pts):
            raise InputError("duplicate point identifiers")
        self.points = pts
        self._index = {p: i for i, p in enumerate(pts)}
        n = len(pts)
        full = (1 << n) - 1
        seen: set[int] = set()
        trivial_given = False
        order: list[int] = []
        for a, b in walls:
            ma = self._mask(a)
            mb = self._mask(b)
            if ma & mb or ma | mb != full:
                raise InputError(
                    f"wall ({sorted(map(repr, a))},{sorted(map(repr, b))}) "
                    "is not a two-part partition of the points")
            if ma == 0 or mb == 0:
                trivial_given = True
                continue
            canon = ma if ma & 1 else mb
            if canon not in seen:
                seen.add(canon)
                order.append(canon)
        if not trivial_given and warn_missing_trivial:
            warnings.warn("trivial wall absent from input; added automatically",
                          stacklevel=2)
        order.sort(key=lambda m: tuple(t for t in range(n) if m >> t & 1))
        self._sides = [(m, full & ~m) for m in order]
        self._full = full
        for i, j in itertools.combinations(range(n), 2):
            if not any((a >> i & 1) != (a >> j & 1) for a, _ in self._sides):
                raise InputError(
                    f"points {pts[i]!r} and {pts[j]!r} are separated by no wall")

    def _mask(self, members: Iterable[Point]) -> int:
        m = 0
        for p in members:
            if p not in self._index:
                raise InputError(f"wall references unknown point {p!r}")
            m |= 1 << self._index[p]
        return m

    def __len__(self) -> int:
        return len(self.points)

    @property
    def wall_count(self) -> int:
        """Number of nontrivial walls."""
        return len(self._sides)

    def index(self, p: Point) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InputError(f"unknown point {p!r}") from None

    def side_masks(self, k: int) -> tuple[int, int]:
        """(canonical side, other side) of nontrivial wall k, as bitmasks."""
        return self._sides[k]

    def wall_sides(self, k: int) -> tuple[frozenset, frozenset]:
        a, b = self._sides[k]
        return (self._unmask(a), self._unmask(b))

    def halfspace_masks(self) -> set[int]:
        """All sides of all walls, including the trivial pair."""
        out = {0, self._full}
        for a, b in self._sides:
            out.add(a)
            out.add(b)
        return out

    def _unmask(self, mask: int) -> frozenset:
        return frozenset(self.points[t] for t in range(len(self.points))
                         if mask >> t & 1)

    def sigma_bits(self, x: Point) -> int:
        """Orientation bitvector of sigma_x: bit k set iff x lies on the
        non-canonical side of wall k."""
        i = self.index(x)
        bits = 0
        for k, (a, _) in enumerate(self._sides):
            if not a >> i & 1:
                bits |= 1 << k
        return bits

    def sigma_halfspaces(self, x: Point) -> frozenset:
        """The halfspaces containing x, as (wall, side) tags; the trivial
        wall contributes its full side."""
        i = self.index(x)
        tags = [("trivial", 1)]
        for k, (a, _) in enumerate(self._sides):
            tags.append((k, 0 if a >> i & 1 else 1))
        return frozenset(tags)

    def separating_walls(self, x: Point, y: Point) -> list[int]:
        i, j = self.index(x), self.index(y)
        return [k for k, (a, _) in enumerate(self._sides)
                if (a >> i & 1) != (a >> j & 1)]

    def wall_metric(self, x: Point, y: Point) -> int:
        """Number of separating walls; asserted equal to half the symmetric
        difference of the halfspace collections."""
        count = len(self.separating_walls(x, y))
        sym = len(self.sigma_halfspaces(x) ^ self.sigma_halfspaces(y))
        if sym != 2 * count:
            raise InternalCheckError(
                f"wall metric mismatch at ({x!r},{y!r}): {count} vs {sym}/2")
        return count


@dataclass(frozen=True)
class Orientation:
    """A choice of one side per wall (trivial wall implicitly chooses X)."""

    space: WallSpace
    bits: int

    def side_mask(self, k: int) -> int:
        a, b = self.space.side_masks(k)
        return b if self.bits >> k & 1 else a

    def chosen_sides(self) -> list[frozenset]:
        return [self.space._unmask(self.side_mask(k))
                for k in range(self.space.wall_count)]

    def is_consistent(self) -> bool:
        masks = [self.side_mask(k) for k in range(self.space.wall_count)]
        return all(a & b for a, b in itertools.combinations(masks, 2)) \
            if len(masks) > 1 else True

    def check_upward_closure(self) -> bool:
        """If a chosen side is contained in a side of another wall, that
        side must be the chosen one (implied by pairwise consistency in
        the finite model; checked independently)."""
        w = self.space.wall_count
        chosen = [self.side_mask(k) for k in range(w)]
        for k in range(w):
            s = chosen[k]
            for l in range(w):
                if l == k:
                    continue
                for t in self.space.side_masks(l):
                    if not s & ~t and chosen[l] != t:
                        return False
        return True


def principal_orientation(w: WallSpace, x: Point) -> Orientation:
    """For each wall, choose the side containing x."""
    o = Orientation(w, w.sigma_bits(x))
    if not o.is_consistent():
        raise InternalCheckError(f"principal orientation of {x!r} inconsistent")
    return o


def is_wall_morphism(f: Mapping[Point, Point], w1: WallSpace, w2: WallSpace) -> bool:
    """True iff the preimage of every halfspace of w2 is a halfspace of w1.

    The trivial wall's sides make constant maps morphisms.
    """
    images = {}
    for p in w1.points:
        if p not in f:
            raise InputError(f"map is not total: {p!r} has no image")
        images[p] = w2.index(f[p])
    legal = w1.halfspace_masks()
    for k in range(w2.wall_count):
        for side in w2.side_masks(k):
            pre = 0
            for p in w1.points:
                if side >> images[p] & 1:
                    pre |= 1 << w1.index(p)
            if pre not in legal:
                return False
    return True


def consistent_orientations_bruteforce(w: WallSpace, max_walls: int = 20) -> set[int]:
    """Oracle: every orientation bitvector whose chosen sides pairwise meet."""
    W = w.wall_count
    if W > max_walls:
        raise ResourceLimitError(
            f"brute-force orientation scan capped at {max_walls} walls", cap=max_walls)
    sides = [w.side_masks(k) for k in range(W)]
    out = set()
    for bits in range(1 << W):
        chosen = [sides[k][bits >> k & 1] for k in range(W)]
        if all(a & b for a, b in itertools.combinations(chosen, 2)) or W <= 1:
            out.add(bits)
    return out


@dataclass
class CubulationResult:
    graph: SimpleGraph
    embedding: dict[Point, Hashable]          # point -> vertex name
    vertex_bits: dict[Hashable, int]          # vertex name -> orientation bits
    wall_correspondence: dict[int, int]       # input wall k -> graph wall index
    cert: MedianGraphCert | None
    checks: dict[str, bool | str] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.graph.vertices)


def _vertex_name(bits: int, width: int) -> str:
    return format(bits, f"0{max(width, 1)}b")


def _majority_closure_check(vertex_bits: np.ndarray, image_bits: list[int]) -> bool:
    """vertex set is majority-stable AND equals the closure of the image."""
    arr = np.sort(vertex_bits.astype(np.int64))
    nv = len(arr)

    def all_members(values: np.ndarray) -> bool:
        flat = values.ravel()
        pos = np.searchsorted(arr, flat)
        pos[pos == nv] = nv - 1
        return bool((arr[pos] == flat).all())

    g = arr[:, None] & arr[None, :]
    u = arr[:, None] | arr[None, :]
    for c in arr:
        if not all_members(g | (u & c)):
            return False

    current = set(image_bits)
    fresh = list(current)
    while fresh:
        cur = np.fromiter(current, dtype=np.int64, count=len(current))
        gg = cur[:, None] & cur[None, :]
        uu = cur[:, None] | cur[None, :]
        added: set[int] = set()
        for c in fresh:
            meds = gg | (uu & c)
            new = np.unique(meds[~np.isin(meds, cur)])
            added.update(int(x) for x in new)
        added -= current
        current |= added
        fresh = list(added)
    return current == {int(b) for b in vertex_bits}


def cubulate(w: WallSpace, *, max_walls: int = DEFAULT_WALL_CAP,
             max_vertices: int = DEFAULT_VERTEX_CAP,
             certify_cap: int = DEFAULT_CERTIFY_CAP,
             closure_cap: int = DEFAULT_CLOSURE_CAP,
             distance_check_cap: int = DEFAULT_DISTANCE_CHECK_CAP) -> CubulationResult:
    """Build the canonical median graph of a wall space.

    Vertices are the consistent orientations reachable from the principal
    orientations by consistency-preserving single-wall flips; edges join
    orientations differing on one wall.  The construction is verified:
    path distance equals Hamming distance on orientation bitvectors, the
    embedded image has the whole vertex set as median closure, the point
    embedding is isometric for the wall metric, and walls correspond
    bijectively.  The cubic-cost checks (generic median certification and
    the closure fixpoint) are gated by ``certify_cap``/``closure_cap``;
    the structural checks always run.
    """
    W = w.wall_count
    if W > max_walls:
        raise ResourceLimitError(
            f"cubulation capped at {max_walls} nontrivial walls, got {W}",
            cap=max_walls)
    sides = [w.side_masks(k) for k in range(W)]

    def flip_ok(masks: list[int], k: int, newmask: int) -> bool:
        return all(newmask & masks[l] for l in range(W) if l != k)

    principals = {p: w.sigma_bits(p) for p in w.points}
    frontier = deque(sorted(set(principals.values())))
    vertex_set: set[int] = set(frontier)
    while frontier:
        bits = frontier.popleft()
        masks = [sides[k][bits >> k & 1] for k in range(W)]
        for k in range(W):
            flipped = bits ^ (1 << k)
            if flipped in vertex_set:
                continue
            if flip_ok(masks, k, sides[k][flipped >> k & 1]):
                vertex_set.add(flipped)
                frontier.append(flipped)
                if len(vertex_set) > max_vertices:
                    raise ResourceLimitError(
                        f"cubulation exceeded {max_vertices} vertices",
                        cap=max_vertices)

    ordered = sorted(vertex_set)
    names = [_vertex_name(b, W) for b in ordered]
    pos = {b: i for i, b in enumerate(ordered)}
    edges = []
    for b in ordered:
        for k in range(W):
            nb = b ^ (1 << k)
            if nb > b and nb in vertex_set:
                edges.append((_vertex_name(b, W), _vertex_name(nb, W)))
    try:
        graph = SimpleGraph(names, edges)
    except InputError as exc:
        raise InternalCheckError(f"cubulation graph invalid: {exc}") from exc

    checks: dict[str, bool | str] = {}
    nv = len(ordered)

    if len(set(principals.values())) != len(w.points):
        raise InternalCheckError("point embedding is not injective")
    checks["embedding_injective"] = True

    for bits in ordered:
        o = Orientation(w, bits)
        if not o.is_consistent():
            raise InternalCheckError(f"inconsistent vertex {bits:b} generated")
    checks["vertices_consistent"] = True

    if nv <= distance_check_cap:
        dist = graph.all_pairs()
        for a in range(nv):
            ba = ordered[a]
            for b in range(a + 1, nv):
                if dist[a][b] != (ba ^ ordered[b]).bit_count():
                    raise InternalCheckError(
                        "path distance differs from wall-flip distance")
        checks["distance_vs_hamming"] = "exhaustive"
    else:
        rng = random.Random(0)
        for a in rng.sample(range(nv), min(nv, 64)):
            dist_a = graph.bfs_distances(a)
            for b in range(nv):
                if dist_a[b] != (ordered[a] ^ ordered[b]).bit_count():
                    raise InternalCheckError(
                        "path distance differs from wall-flip distance")
        checks["distance_vs_hamming"] = "sampled"

    for x in w.points:
        for y in w.points:
            if w.wall_metric(x, y) != (principals[x] ^ principals[y]).bit_count():
                raise InternalCheckError("embedding not isometric for wall metric")
    checks["embedding_isometric"] = True

    if nv <= closure_cap:
        arr = np.fromiter(ordered, dtype=np.int64, count=nv)
        if not _majority_closure_check(arr, sorted(set(principals.values()))):
            raise InternalCheckError(
                "vertex set is not the median closure of the embedded image")
        checks["median_closure"] = "checked"
    else:
        checks["median_closure"] = "skipped"

    cert = None
    if nv <= certify_cap:
        cert = certify_median_graph(graph)
        corr: dict[int, int] = {}
        side_by_mask = {}
        for widx, wall in enumerate(cert.walls):
            side_by_mask[wall.side] = widx
        for k in range(W):
            side0 = frozenset(_vertex_name(b, W) for b in ordered if not b >> k & 1)
            side1 = frozenset(_vertex_name(b, W) for b in ordered if b >> k & 1)
            hit = side_by_mask.get(side0, side_by_mask.get(side1))
            if hit is None:
                raise InternalCheckError(f"input wall {k} has no graph wall")
            corr[k] = hit
        if len(set(corr.values())) != len(cert.walls) or len(corr) != len(cert.walls):
            raise InternalCheckError("wall correspondence is not a bijection")
        checks["wall_bijection"] = "certified"
    else:
        corr = {}
        for k in range(W):
            lo = sum(1 for b in ordered if not b >> k & 1)
            if lo == 0 or lo == nv:
                raise InternalCheckError(f"input wall {k} collapsed in the graph")
            corr[k] = k
        checks["wall_bijection"] = "structural"

    embedding = {p: _vertex_name(bits, W) for p, bits in principals.items()}
    vertex_bits = {name: b for name, b in zip(names, ordered)}
    return CubulationResult(graph, embedding, vertex_bits, corr, cert, checks)


def graph_wall_space(cert: MedianGraphCert) -> WallSpace:
    """A median graph as a space with walls (its edge halfspaces)."""
    return WallSpace(cert.vertices,
                     [(wall.side, wall.complement) for wall in cert.walls])


def extend_morphism(f: Mapping[Point, Point], w1: WallSpace, w2: WallSpace,
                    cub1: CubulationResult | None = None,
                    cub2: CubulationResult | None = None) -> dict:
    """Extend a wall morphism to the unique median morphism between the
    cubulations, as a vertex map (need not be a graph morphism).
    """
    if not is_wall_morphism(f, w1, w2):
        raise InputError("map is not a wall morphism")
    cub1 = cub1 or cubulate(w1)
    cub2 = cub2 or cubulate(w2)
    full1 = (1 << len(w1.points)) - 1

    # per wall of w2: how its orientation is read off an orientation of w1
    rules: list[tuple[str, int, bool]] = []
    side_index: dict[int, tuple[int, bool]] = {}
    for k in range(w1.wall_count):
        a, b = w1.side_masks(k)
        side_index[a] = (k, False)
        side_index[b] = (k, True)
    for k2 in range(w2.wall_count):
        a2, _ = w2.side_masks(k2)
        pre = 0
        for p in w1.points:
            if a2 >> w2.index(f[p]) & 1:
                pre |= 1 << w1.index(p)
        if pre == full1:
            rules.append(("const", 0, False))
        elif pre == 0:
            rules.append(("const", 1, False))
        else:
            k1, flipped = side_index[pre]
            rules.append(("wall", k1, flipped))

    out = {}
    w2_vertices = set(cub2.graph.vertices)
    for name, bits in cub1.vertex_bits.items():
        img = 0
        for k2, (kind, val, flipped) in enumerate(rules):
            if kind == "const":
                bit = val
            else:
                bit = (bits >> val & 1) ^ flipped
            img |= bit << k2
        img_name = _vertex_name(img, w2.wall_count)
        if img_name not in w2_vertices:
            raise InternalCheckError(
                "extension left the target cubulation's vertex set")
        out[name] = img_name
    for p in w1.points:
        if out[cub1.embedding[p]] != cub2.embedding[f[p]]:
            raise InternalCheckError("extension disagrees with the point map")
    return out
