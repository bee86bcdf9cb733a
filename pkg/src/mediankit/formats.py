"""JSON formats for every payload type, plus DOT export.

Rationals travel as strings ("3", "5/2"); floats are rejected in metric
input.  Interval keys are "x,y", so point ids there must not contain
commas.  All emitters sort keys and end with a newline, keeping outputs
byte-stable for golden tests.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebra import IntervalStructure
from .convexity import PointCloud
from .errors import InputError
from .graphs import CubeComplex, MedianGraphCert, SimpleGraph
from .metric import FiniteMetric
from .walls import WallSpace


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object at top level")
    return data


def rational_str(value: Fraction) -> str:
    return str(Fraction(value))


# -- interval structures ----------------------------------------------

def interval_structure_from_json(data: dict) -> IntervalStructure:
    try:
        points = list(data["points"])
        raw = data["intervals"]
    except KeyError as exc:
        raise InputError(f"interval structure JSON missing key {exc}") from None
    for p in points:
        if not isinstance(p, str) or "," in p:
            raise InputError(f"point ids must be comma-free strings, got {p!r}")
    table = {}
    for key, members in raw.items():
        parts = key.split(",")
        if len(parts) != 2:
            raise InputError(f"interval key {key!r} is not of the form 'x,y'")
        table[(parts[0], parts[1])] = members
    return IntervalStructure(points, table)


def interval_structure_to_json(s: IntervalStructure, expected: dict | None = None) -> dict:
    out = {
        "points": list(s.points),
        "intervals": {f"{x},{y}": sorted(s.interval(x, y))
                      for x in s.points for y in s.points},
    }
    if expected:
        out["expected"] = expected
    return out


# -- metrics -----------------------------------------------------------

def metric_from_json(data: dict) -> FiniteMetric:
    try:
        points = list(data["points"])
        rows = data["dist"]
    except KeyError as exc:
        raise InputError(f"metric JSON missing key {exc}") from None
    if len(rows) == len(points) and all(len(r) == len(points) for r in rows):
        return FiniteMetric(points, rows)
    return FiniteMetric.from_upper_triangle(points, rows)


def metric_to_json(m: FiniteMetric, expected: dict | None = None) -> dict:
    out = {
        "points": list(m.points),
        "dist": [[rational_str(v) for v in row] for row in m.upper_triangle()],
    }
    if expected:
        out["expected"] = expected
    return out


# -- graphs ------------------------------------------------------------

def graph_from_json(data: dict) -> SimpleGraph:
    try:
        vertices = list(data["vertices"])
        edges = [tuple(e) for e in data["edges"]]
    except KeyError as exc:
        raise InputError(f"graph JSON missing key {exc}") from None
    for e in edges:
        if len(e) != 2:
            raise InputError(f"edge {e!r} must have exactly two endpoints")
    return SimpleGraph(vertices, edges)


def graph_to_json(g: SimpleGraph, expected: dict | None = None) -> dict:
    out = {"vertices": list(g.vertices),
           "edges": [[u, v] for u, v in g.edges]}
    if expected:
        out["expected"] = expected
    return out


# -- wall spaces ---------------------------------------------------------

def walls_from_json(data: dict) -> WallSpace:
    try:
        points = list(data["points"])
        walls = data["walls"]
    except KeyError as exc:
        raise InputError(f"wall-space JSON missing key {exc}") from None
    pairs = []
    for w in walls:
        if len(w) != 2:
            raise InputError(f"wall {w!r} must list exactly two sides")
        pairs.append((w[0], w[1]))
    return WallSpace(points, pairs, warn_missing_trivial=True)


def walls_to_json(w: WallSpace, expected: dict | None = None) -> dict:
    walls = [[[], list(w.points)]]      # the trivial wall, explicitly
    for k in range(w.wall_count):
        a, b = w.wall_sides(k)
        walls.append([sorted(a, key=w.index), sorted(b, key=w.index)])
    out = {"points": list(w.points), "walls": walls}
    if expected:
        out["expected"] = expected
    return out


# -- point clouds ---------------------------------------------------------

def cloud_from_json(data: dict) -> PointCloud:
    try:
        points = data["points"]
        norm = data.get("norm", "euclidean")
    except KeyError as exc:
        raise InputError(f"point-cloud JSON missing key {exc}") from None
    return PointCloud.build(points, norm)


# -- cube complexes ---------------------------------------------------------

def cube_complex_to_json(cc: CubeComplex) -> dict:
    return {"cubes": {str(k): [sorted(map(str, cube)) for cube in cubes]
                      for k, cubes in sorted(cc.cubes.items())}}


# -- actions ------------------------------------------------------------

def action_from_json(data: dict) -> tuple[dict, object]:
    try:
        generators = data["generators"]
        basepoint = data["basepoint"]
    except KeyError as exc:
        raise InputError(f"action JSON missing key {exc}") from None
    if not isinstance(generators, dict) or not generators:
        raise InputError("action JSON needs a nonempty 'generators' object")
    return generators, basepoint


# -- payload dispatch -----------------------------------------------------

def detect_payload(data: dict) -> str:
    if "intervals" in data:
        return "intervals"
    if "dist" in data:
        return "metric"
    if "walls" in data:
        return "walls"
    if "edges" in data and "vertices" in data:
        return "graph"
    if "generators" in data:
        return "action"
    if "points" in data and "norm" in data:
        return "cloud"
    raise InputError("cannot recognize the payload type from its keys")


_PALETTE = ("#1b6ca8", "#c23b22", "#2e8b57", "#b8860b", "#6a3d9a", "#107896",
            "#a0522d", "#e75480", "#556b2f", "#483d8b", "#8b0000", "#008080")


def dot_export(g: SimpleGraph, cert: MedianGraphCert | None = None) -> str:
    """Graphviz text (graph/node/edge statements only); with a certificate,
    edges are colored by the wall they cross."""
    colour: dict[tuple, str] = {}
    if cert is not None:
        for k, wall in enumerate(cert.walls):
            for u, v in wall.crossing_edges:
                colour[(u, v)] = _PALETTE[k % len(_PALETTE)]
                colour[(v, u)] = _PALETTE[k % len(_PALETTE)]
    lines = ["graph G {"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for u, v in g.edges:
        paint = colour.get((u, v))
        if paint:
            lines.append(f'  "{u}" -- "{v}" [color="{paint}"];')
        else:
            lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
