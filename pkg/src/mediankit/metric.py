"""Finite metric spaces with exact arithmetic.

Distances are rationals; internally everything is rescaled to integers so
interval membership, the median leg identity and the lemma scans are plain
integer equalities.  Geodesic intervals are [x,y] = {t : d(x,t)+d(t,y) = d(x,y)}.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .algebra import FiniteMedianAlgebra, IntervalStructure
from .errors import InputError, InternalCheckError, NotMedianError

Point = Hashable

EAGER_MEDIAN_TABLE_CAP = 100


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {value!r}: {exc}") from None
    if isinstance(value, float):
        raise InputError(
            f"float distance {value!r} rejected; pass an int, Fraction or 'p/q' string")
    raise InputError(f"cannot interpret {value!r} as a rational")


class FiniteMetric:
    """A finite point set with an exact, validated metric."""

    def __init__(self, points: Sequence[Point], matrix: Sequence[Sequence]):
        pts = list(points)
        n = len(pts)
        if n == 0:
            raise InputError("a metric space needs at least one point")
        if len(set(pts)) != len(pts):
            raise InputError("duplicate point identifiers")
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise InputError(f"distance matrix must be {n}x{n}")
        frac = [[_to_fraction(v) for v in row] for row in matrix]
        scale = 1
        for row in frac:
            for v in row:
                scale = scale * v.denominator // math.gcd(scale, v.denominator)
        di = [[int(v * scale) for v in row] for row in frac]
        for i in range(n):
            if di[i][i] != 0:
                raise InputError(f"nonzero self-distance at {pts[i]!r}")
            for j in range(i + 1, n):
                if di[i][j] != di[j][i]:
                    raise InputError(f"asymmetric distances for ({pts[i]!r},{pts[j]!r})")
                if di[i][j] <= 0:
                    raise InputError(
                        f"non-positive distance between distinct points ({pts[i]!r},{pts[j]!r})")
        for i, j, k in itertools.combinations(range(n), 3):
            a, b, c = di[i][j], di[j][k], di[i][k]
            if a + b < c or a + c < b or b + c < a:
                raise InputError(
                    f"triangle inequality fails on ({pts[i]!r},{pts[j]!r},{pts[k]!r})")
        self.points = pts
        self._index = {p: i for i, p in enumerate(pts)}
        self._scale = scale
        self._di = di
        self._betw: list[list[int]] | None = None

    @classmethod
    def from_upper_triangle(cls, points: Sequence[Point],
                            rows: Sequence[Sequence]) -> "FiniteMetric":
        """Rows i = distances from points[i] to points[i+1:], row-major."""
        pts = list(points)
        n = len(pts)
        if len(rows) not in (n - 1, n):
            raise InputError(f"expected {n - 1} upper-triangle rows, got {len(rows)}")
        full = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n - 1):
            row = rows[i]
            if len(row) != n - 1 - i:
                raise InputError(f"upper-triangle row {i} must have {n - 1 - i} entries")
            for off, v in enumerate(row):
                j = i + 1 + off
                full[i][j] = full[j][i] = _to_fraction(v)
        return cls(pts, full)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def scale(self) -> int:
        return self._scale

    def index(self, p: Point) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InputError(f"unknown point {p!r}") from None

    def dist(self, x: Point, y: Point) -> Fraction:
        return Fraction(self._di[self.index(x)][self.index(y)], self._scale)

    def dist_int(self, i: int, j: int) -> int:
        """Scaled integer distance between point indices."""
        return self._di[i][j]

    def upper_triangle(self) -> list[list[Fraction]]:
        n = len(self.points)
        return [[Fraction(self._di[i][j], self._scale) for j in range(i + 1, n)]
                for i in range(n - 1)]

    # -- geodesic intervals -------------------------------------------

    def _between(self) -> list[list[int]]:
        """Bitmask table: bit t of [i][j] set iff t lies between i and j."""
        if self._betw is None:
            n = len(self.points)
            d = self._di
            betw = [[0] * n for _ in range(n)]
            for i in range(n):
                di_ = d[i]
                for j in range(i, n):
                    dj = d[j]
                    dij = di_[j]
                    m = 0
                    for t in range(n):
                        if di_[t] + dj[t] == dij:
                            m |= 1 << t
                    betw[i][j] = betw[j][i] = m
            self._betw = betw
        return self._betw

    def between_mask(self, i: int, j: int) -> int:
        return self._between()[i][j]

    def geodesic_interval(self, x: Point, y: Point) -> frozenset:
        m = self.between_mask(self.index(x), self.index(y))
        return frozenset(p for t, p in enumerate(self.points) if m >> t & 1)

    def interval_structure(self) -> IntervalStructure:
        table = {(x, y): self.geodesic_interval(x, y)
                 for x in self.points for y in self.points}
        return IntervalStructure(self.points, table)

    def to_algebra(self) -> FiniteMedianAlgebra:
        """Promote the geodesic intervals; fails unless the metric is median."""
        return FiniteMedianAlgebra.promote(self.interval_structure())

    def submetric(self, subset: Iterable[Point]) -> "FiniteMetric":
        keep = [p for p in self.points if p in set(subset)]
        idx = [self.index(p) for p in keep]
        rows = [[Fraction(self._di[i][j], self._scale) for j in idx] for i in idx]
        return FiniteMetric(keep, rows)


@dataclass(frozen=True)
class Classification:
    kind: str  # "median" | "modular" | "neither"
    witness: tuple | None = None      # offending triple of points
    intersection: frozenset | None = None

    @property
    def is_median(self) -> bool:
        return self.kind == "median"


def classify(m: FiniteMetric, _collect: dict | None = None) -> Classification:
    """Scan all triples: median iff every triple intersection is a
    singleton, modular iff every one is nonempty, else neither.

    Direct O(n^4) scan (n^3 triples, n-bit intersections); fine at desk
    scale, say n up to a couple hundred points.
    """
    n = len(m.points)
    betw = m._between()
    empty_w = None
    multi_w = None
    for i, j, k in itertools.combinations(range(n), 3):
        inter = betw[i][j] & betw[j][k] & betw[k][i]
        c = inter.bit_count()
        if c == 1:
            if _collect is not None:
                _collect[(i, j, k)] = inter.bit_length() - 1
        elif c == 0:
            if empty_w is None:
                empty_w = ((i, j, k), inter)
        else:
            if multi_w is None:
                multi_w = ((i, j, k), inter)
    hit = empty_w if empty_w is not None else multi_w
    if hit is not None:
        (i, j, k), inter = hit
        pts = tuple(m.points[t] for t in (i, j, k))
        members = frozenset(m.points[t] for t in range(n) if inter >> t & 1)
        return Classification("neither" if empty_w is not None else "modular",
                              pts, members)
    return Classification("median")


class MedianMetric(FiniteMetric):
    """A finite metric certified median, with a memoized median table.

    Certification also verifies the leg identity
    2*d(x,m) = d(x,y)+d(x,z)-d(y,z) (and its two analogues) exactly on
    every triple.
    """

    def __init__(self, points, matrix):
        super().__init__(points, matrix)
        self._med: dict[tuple[int, int, int], int] = {}
        self._certify()

    def _certify(self) -> None:
        table: dict = {}
        n = len(self.points)
        verdict = classify(self, _collect=table if n <= EAGER_MEDIAN_TABLE_CAP else None)
        if not verdict.is_median:
            raise NotMedianError(
                f"not a median metric: triple {verdict.witness!r} has "
                f"{len(verdict.intersection or ())} common interval points",
                witness=verdict)
        self._med = table
        d = self._di
        for (i, j, k) in itertools.combinations(range(n), 3):
            mi = self.median_index(i, j, k)
            if (2 * d[i][mi] != d[i][j] + d[i][k] - d[j][k]
                    or 2 * d[j][mi] != d[j][i] + d[j][k] - d[i][k]
                    or 2 * d[k][mi] != d[k][i] + d[k][j] - d[i][j]):
                raise InternalCheckError(
                    f"median leg identity fails at triple {(i, j, k)}")

    @classmethod
    def certify(cls, metric: FiniteMetric) -> "MedianMetric":
        rows = [[Fraction(metric._di[i][j], metric._scale)
                 for j in range(len(metric.points))]
                for i in range(len(metric.points))]
        return cls(metric.points, rows)

    def median_index(self, i: int, j: int, k: int) -> int:
        key = tuple(sorted((i, j, k)))
        got = self._med.get(key)
        if got is not None:
            return got
        betw = self._between()
        inter = betw[i][j] & betw[j][k] & betw[k][i]
        if inter.bit_count() != 1:
            raise InternalCheckError(f"median not unique at {key}")
        mi = inter.bit_length() - 1
        self._med[key] = mi
        return mi

    def median_point(self, x: Point, y: Point, z: Point) -> Point:
        return self.points[self.median_index(self.index(x), self.index(y),
                                             self.index(z))]


def product(m1: MedianMetric, m2: MedianMetric) -> MedianMetric:
    """The l1 product metric on pairs; re-certified, and the median of a
    triple is checked to be the componentwise median (up to 64 points).
    """
    pts = [(p, q) for p in m1.points for q in m2.points]
    n2 = len(m2.points)
    n = len(pts)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        i1, i2 = divmod(a, n2)
        for b in range(a + 1, n):
            j1, j2 = divmod(b, n2)
            v = (Fraction(m1._di[i1][j1], m1._scale)
                 + Fraction(m2._di[i2][j2], m2._scale))
            rows[a][b] = rows[b][a] = v
    out = MedianMetric(pts, rows)
    if n <= 64:
        for a, b, c in itertools.combinations(range(n), 3):
            (a1, a2), (b1, b2), (c1, c2) = (divmod(a, n2), divmod(b, n2),
                                            divmod(c, n2))
            want = (m1.points[m1.median_index(a1, b1, c1)],
                    m2.points[m2.median_index(a2, b2, c2)])
            if out.points[out.median_index(a, b, c)] != want:
                raise InternalCheckError(
                    "product median is not componentwise at "
                    f"{(pts[a], pts[b], pts[c])}")
    return out


@dataclass(frozen=True)
class PropertyReport:
    name: str
    passed: bool
    checked: int
    mode: str                   # "exhaustive" | "sampled"
    witness: tuple | None = None
    seed: int | None = None


def _multiset_triples(n: int):
    return itertools.combinations_with_replacement(range(n), 3)


def check_colinear_lemma(m: MedianMetric, exhaustive_cap: int = 50,
                         samples: int = 20000, seed: int = 0) -> PropertyReport:
    """For m the median of (x,y,z): every v between y and z has m between
    x and v.  Exhaustive up to the cap, seeded sampling beyond.
    """
    n = len(m.points)
    d = m._di
    betw = m._between()
    checked = 0

    def holds(x: int, y: int, z: int, v: int) -> bool:
        mi = m.median_index(x, y, z)
        return d[x][mi] + d[mi][v] == d[x][v]

    if n <= exhaustive_cap:
        for x in range(n):
            for y in range(n):
                for z in range(y, n):
                    mask = betw[y][z]
                    v = 0
                    while mask:
                        if mask & 1:
                            checked += 1
                            if not holds(x, y, z, v):
                                pts = tuple(m.points[t] for t in (x, y, z, v))
                                return PropertyReport("colinear-median", False,
                                                      checked, "exhaustive", pts)
                        mask >>= 1
                        v += 1
        return PropertyReport("colinear-median", True, checked, "exhaustive")

    rng = random.Random(seed)
    for _ in range(samples):
        x, y, z = (rng.randrange(n) for _ in range(3))
        members = [t for t in range(n) if betw[y][z] >> t & 1]
        v = rng.choice(members)
        checked += 1
        if not holds(x, y, z, v):
            pts = tuple(m.points[t] for t in (x, y, z, v))
            return PropertyReport("colinear-median", False, checked, "sampled",
                                  pts, seed)
    return PropertyReport("colinear-median", True, checked, "sampled", None, seed)


@dataclass(frozen=True)
class LipschitzReport:
    near_median: PropertyReport
    median_map: PropertyReport

    @property
    def passed(self) -> bool:
        return self.near_median.passed and self.median_map.passed


_PERMS3 = tuple(itertools.permutations(range(3)))


def check_median_lipschitz(m: MedianMetric, point_cap: int = 50,
                           pair_cap: int = 12, samples: int = 20000,
                           seed: int = 0) -> LipschitzReport:
    """Two inequalities, verified on every tuple (or a seeded sample):

    i)  d(v,m) <= (d(v,x)+d(v,y)+d(v,z)) - (d(m,x)+d(m,y)+d(m,z))
    ii) d(m,m') <= d(x,x')+d(y,y')+d(z,z')

    Since the median is symmetric in its arguments, scanning unordered
    triples and all pairings covers every ordered tuple.
    """
    n = len(m.points)
    d = m._di

    triples = list(_multiset_triples(n))
    meds = [m.median_index(*t) for t in triples]
    legsum = [d[t[0]][mi] + d[t[1]][mi] + d[t[2]][mi]
              for t, mi in zip(triples, meds)]

    checked = 0
    witness = None
    if n <= point_cap:
        mode1 = "exhaustive"
        for (t, mi, ls) in zip(triples, meds, legsum):
            x, y, z = t
            for v in range(n):
                checked += 1
                if d[v][mi] > d[v][x] + d[v][y] + d[v][z] - ls:
                    witness = tuple(m.points[q] for q in (x, y, z, v))
                    break
            if witness:
                break
    else:
        mode1 = "sampled"
        rng = random.Random(seed)
        for _ in range(samples):
            x, y, z = (rng.randrange(n) for _ in range(3))
            v = rng.randrange(n)
            mi = m.median_index(x, y, z)
            ls = d[x][mi] + d[y][mi] + d[z][mi]
            checked += 1
            if d[v][mi] > d[v][x] + d[v][y] + d[v][z] - ls:
                witness = tuple(m.points[q] for q in (x, y, z, v))
                break
    rep1 = PropertyReport("near-median-bound", witness is None, checked, mode1,
                          witness, seed if mode1 == "sampled" else None)

    checked = 0
    witness = None

    def pairing_ok(t1, m1_, t2, m2_) -> bool:
        dm = d[m1_][m2_]
        return all(dm <= d[t1[0]][t2[p[0]]] + d[t1[1]][t2[p[1]]] + d[t1[2]][t2[p[2]]]
                   for p in _PERMS3)

    if n <= pair_cap:
        mode2 = "exhaustive"
        for a in range(len(triples)):
            t1, mi1 = triples[a], meds[a]
            for b in range(a, len(triples)):
                checked += 1
                if not pairing_ok(t1, mi1, triples[b], meds[b]):
                    witness = (tuple(m.points[q] for q in t1),
                               tuple(m.points[q] for q in triples[b]))
                    break
            if witness:
                break
    else:
        mode2 = "sampled"
        rng = random.Random(seed + 1)
        for _ in range(samples):
            t1 = tuple(sorted(rng.randrange(n) for _ in range(3)))
            t2 = tuple(sorted(rng.randrange(n) for _ in range(3)))
            checked += 1
            if not pairing_ok(t1, m.median_index(*t1), t2, m.median_index(*t2)):
                witness = (tuple(m.points[q] for q in t1),
                           tuple(m.points[q] for q in t2))
                break
    rep2 = PropertyReport("median-map-lipschitz", witness is None, checked, mode2,
                          witness, seed + 1 if mode2 == "sampled" else None)
    return LipschitzReport(rep1, rep2)


def find_rectangles(m: MedianMetric) -> list[tuple]:
    """All ordered 4-tuples (x,y,z,t) with y,t between x,z and x,z between
    y,t.  Opposite sides are asserted equal, as the theory guarantees.
    """
    n = len(m.points)
    d = m._di
    betw = m._between()
    out = []
    for x in range(n):
        for z in range(n):
            mask = betw[x][z]
            members = [t for t in range(n) if mask >> t & 1]
            for y in members:
                for t in members:
                    byt = betw[y][t]
                    if byt >> x & 1 and byt >> z & 1:
                        if d[x][y] != d[z][t] or d[y][z] != d[t][x]:
                            raise InternalCheckError(
                                "rectangle with unequal opposite sides at "
                                f"{(x, y, z, t)}")
                        out.append(tuple(m.points[q] for q in (x, y, z, t)))
    return out
