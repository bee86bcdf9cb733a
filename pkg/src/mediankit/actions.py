"""Finite group actions as generator permutations, and the displacement
identities their affine Hilbert-space actions satisfy.

For an isometric action on a negative-definite metric the displacement of
the affinized action at the origin is sqrt(d(v, gv)); for an action on a
wall space it is |sigma_gv symdiff sigma_v| = 2 * wall-distance(v, gv).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .embedding import GnsEmbedding, gns_embed
from .errors import InputError, InternalCheckError
from .metric import FiniteMetric
from .walls import WallSpace

Point = Hashable


def _check_permutation(name: str, mapping: Mapping, points: list) -> dict:
    out = {}
    for p in points:
        if p not in mapping:
            raise InputError(f"generator {name!r} is not total: {p!r} unmapped")
        out[p] = mapping[p]
    if set(out.values()) != set(points):
        raise InputError(f"generator {name!r} is not a bijection of the points")
    return out


def parse_word(word: str | Sequence[str]) -> list[str]:
    if isinstance(word, str):
        return word.split()
    return list(word)


def apply_word(generators: Mapping[str, Mapping], word: str | Sequence[str],
               points: list) -> dict:
    """Compose generators left to right: the first named acts first."""
    current = {p: p for p in points}
    for name in parse_word(word):
        if name not in generators:
            raise InputError(f"unknown generator {name!r}")
        g = generators[name]
        current = {p: g[current[p]] for p in points}
    return current


@dataclass
class MetricAction:
    """Generators must preserve every distance."""

    metric: FiniteMetric
    generators: dict[str, dict]
    basepoint: Point

    def __post_init__(self):
        pts = self.metric.points
        self.metric.index(self.basepoint)
        checked = {}
        for name, g in self.generators.items():
            perm = _check_permutation(name, g, pts)
            for x in pts:
                for y in pts:
                    if self.metric.dist(perm[x], perm[y]) != self.metric.dist(x, y):
                        raise InputError(
                            f"generator {name!r} is not an isometry: distance of "
                            f"({x!r},{y!r}) changes")
            checked[name] = perm
        self.generators = checked


@dataclass
class WallAction:
    """Generators must permute the walls."""

    space: WallSpace
    generators: dict[str, dict]
    basepoint: Point

    def __post_init__(self):
        pts = self.space.points
        self.space.index(self.basepoint)
        wall_keys = set()
        for k in range(self.space.wall_count):
            a, b = self.space.wall_sides(k)
            wall_keys.add(frozenset((a, b)))
        checked = {}
        for name, g in self.generators.items():
            perm = _check_permutation(name, g, pts)
            for k in range(self.space.wall_count):
                a, b = self.space.wall_sides(k)
                img = frozenset((frozenset(perm[p] for p in a),
                                 frozenset(perm[p] for p in b)))
                if img not in wall_keys:
                    raise InputError(
                        f"generator {name!r} does not preserve the wall "
                        f"({sorted(map(repr, a))} | {sorted(map(repr, b))})")
            checked[name] = perm
        self.generators = checked


@dataclass(frozen=True)
class MetricDisplacement:
    word: tuple[str, ...]
    image: Point
    distance: Fraction          # d(v, gv), exact
    embedded_sq: float          # ||gamma(gv) - gamma(v)||^2
    tol: float

    @property
    def identity_holds(self) -> bool:
        return abs(self.embedded_sq - float(self.distance)) <= self.tol


def displacement_metric(action: MetricAction, word: str | Sequence[str],
                        tol: float = 1e-9,
                        embedding: GnsEmbedding | None = None) -> MetricDisplacement:
    """d(v, gv) exactly, plus the squared displacement of the embedded
    points, which must agree within tol."""
    names = parse_word(word)
    g = apply_word(action.generators, names, action.metric.points)
    v = action.basepoint
    gv = g[v]
    dist = action.metric.dist(v, gv)
    emb = embedding or gns_embed(action.metric, tol=tol)
    sq = emb.distance_sq(v, gv)
    out = MetricDisplacement(tuple(names), gv, dist, sq, tol)
    if not out.identity_holds:
        raise InternalCheckError(
            f"embedded displacement {sq!r} differs from d(v,gv) = {dist}")
    return out


@dataclass(frozen=True)
class WallDisplacement:
    word: tuple[str, ...]
    image: Point
    wall_distance: int          # |v gv|_w
    sigma_symdiff: int          # |sigma_gv symdiff sigma_v|

    @property
    def identity_holds(self) -> bool:
        return self.sigma_symdiff == 2 * self.wall_distance


def displacement_walls(action: WallAction, word: str | Sequence[str]) -> WallDisplacement:
    """(wall distance, halfspace symmetric difference); the second is
    asserted to be exactly twice the first."""
    names = parse_word(word)
    g = apply_word(action.generators, names, action.space.points)
    v = action.basepoint
    gv = g[v]
    wd = action.space.wall_metric(v, gv)
    sym = len(action.space.sigma_halfspaces(v) ^ action.space.sigma_halfspaces(gv))
    out = WallDisplacement(tuple(names), gv, wd, sym)
    if not out.identity_holds:
        raise InternalCheckError(
            f"|sigma symdiff| = {sym} is not twice the wall distance {wd}")
    return out
