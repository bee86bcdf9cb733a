import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mediankit import (FiniteMetric, InputError, MedianMetric, NotMedianError,
                       check_colinear_lemma, check_median_lipschitz, classify,
                       find_rectangles, product)
from mediankit.corpus import (complete_bipartite_graph, cycle_graph,
                              grid_graph, hypercube_graph, path_graph,
                              random_tree)


def triple_intersections_oracle(metric):
    """Direct scan from the distance matrix, independent of the library's
    bitmask machinery."""
    pts = metric.points
    d = {(x, y): metric.dist(x, y) for x in pts for y in pts}

    def interval(x, y):
        return {t for t in pts if d[x, t] + d[t, y] == d[x, y]}

    out = {}
    for x, y, z in itertools.combinations(pts, 3):
        out[(x, y, z)] = interval(x, y) & interval(y, z) & interval(z, x)
    return out


# ---------------------------------------------------------------- validation

def test_construction_validates_the_axioms():
    with pytest.raises(InputError, match="asymmetric"):
        FiniteMetric(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(InputError, match="self-distance"):
        FiniteMetric(["a", "b"], [[1, 1], [1, 0]])
    with pytest.raises(InputError, match="non-positive"):
        FiniteMetric(["a", "b"], [[0, 0], [0, 0]])
    with pytest.raises(InputError, match="triangle"):
        FiniteMetric(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(InputError, match="float"):
        FiniteMetric(["a", "b"], [[0, 0.5], [0.5, 0]])


def test_rational_strings_and_exact_dist():
    m = FiniteMetric(["a", "b", "c"],
                     [[0, "1/2", "3/4"], ["1/2", 0, "1/4"], ["3/4", "1/4", 0]])
    assert m.dist("a", "b") == Fraction(1, 2)
    assert m.dist("a", "c") == Fraction(3, 4)
    assert m.scale == 4


def test_upper_triangle_round_trip():
    m = FiniteMetric.from_upper_triangle(["a", "b", "c"], [["1/2", "3/4"], ["1/4"]])
    assert m.dist("b", "c") == Fraction(1, 4)
    assert m.upper_triangle() == [[Fraction(1, 2), Fraction(3, 4)], [Fraction(1, 4)]]


# ---------------------------------------------------------------- intervals

def test_interval_of_a_point_with_itself():
    m = path_graph(3).path_metric()
    for p in m.points:
        assert m.geodesic_interval(p, p) == frozenset({p})


def test_path_interval_is_everything_between():
    m = path_graph(3).path_metric()
    v0, v1, v2 = m.points
    assert m.geodesic_interval(v0, v2) == frozenset({v0, v1, v2})


def test_six_cycle_interval():
    m = cycle_graph(6).path_metric()
    v = m.points
    assert m.geodesic_interval(v[0], v[2]) == frozenset({v[0], v[1], v[2]})


# ---------------------------------------------------------------- classify

def test_tree_metrics_are_median():
    for seed in (1, 5, 9):
        m = random_tree(10, seed).path_metric()
        assert classify(m).kind == "median"


def test_six_cycle_is_neither_with_an_empty_triple():
    m = cycle_graph(6).path_metric()
    c = classify(m)
    assert c.kind == "neither"
    assert c.intersection == frozenset()
    x, y, z = c.witness
    oracle = triple_intersections_oracle(m)
    key = tuple(sorted((x, y, z), key=m.points.index))
    assert oracle[key] == set()


def test_k23_is_modular_not_median():
    m = complete_bipartite_graph(2, 3).path_metric()
    c = classify(m)
    assert c.kind == "modular"
    assert len(c.intersection) > 1
    oracle = triple_intersections_oracle(m)
    assert all(len(v) >= 1 for v in oracle.values())
    assert any(len(v) > 1 for v in oracle.values())


def test_classify_matches_oracle_on_mixed_instances():
    for g in (path_graph(5), cycle_graph(4), cycle_graph(5), hypercube_graph(3)):
        m = g.path_metric()
        oracle = triple_intersections_oracle(m)
        sizes = [len(v) for v in oracle.values()]
        if all(s == 1 for s in sizes):
            expect = "median"
        elif all(s >= 1 for s in sizes):
            expect = "modular"
        else:
            expect = "neither"
        assert classify(m).kind == expect


# ---------------------------------------------------------------- medians

def test_median_point_degenerate_triple():
    m = MedianMetric.certify(path_graph(3).path_metric())
    for x in m.points:
        for y in m.points:
            assert m.median_point(x, x, y) == x


def test_four_cycle_median_and_leg_value():
    m = MedianMetric.certify(cycle_graph(4).path_metric())
    v = m.points
    assert m.median_point(v[0], v[1], v[2]) == v[1]
    legs = (m.dist(v[0], v[1]) + m.dist(v[0], v[2]) - m.dist(v[1], v[2])) / 2
    assert m.dist(v[0], m.median_point(v[0], v[1], v[2])) == legs == 1


def test_cube_median_is_bitwise_majority():
    m = MedianMetric.certify(hypercube_graph(3).path_metric())
    assert m.median_point("000", "011", "101") == "001"
    assert m.dist("000", "001") == 1
    for x, y, z in itertools.combinations(m.points, 3):
        maj = "".join("1" if (a + b + c).count("1") >= 2 else "0"
                      for a, b, c in zip(x, y, z))
        assert m.median_point(x, y, z) == maj


def test_leg_identity_exact_on_all_triples():
    for g in (path_graph(4), cycle_graph(4), hypercube_graph(3), grid_graph(3, 3)):
        m = MedianMetric.certify(g.path_metric())
        for x, y, z in itertools.combinations(m.points, 3):
            md = m.median_point(x, y, z)
            assert m.dist(x, md) == (m.dist(x, y) + m.dist(x, z) - m.dist(y, z)) / 2
            assert m.dist(y, md) == (m.dist(y, x) + m.dist(y, z) - m.dist(x, z)) / 2
            assert m.dist(z, md) == (m.dist(z, x) + m.dist(z, y) - m.dist(x, y)) / 2


def test_certify_rejects_non_median_with_witness():
    with pytest.raises(NotMedianError) as err:
        MedianMetric.certify(cycle_graph(6).path_metric())
    assert err.value.witness.kind == "neither"


# ---------------------------------------------------------------- products

def test_product_with_a_point_is_isometric():
    single = MedianMetric.certify(FiniteMetric(["o"], [[0]]))
    m = MedianMetric.certify(path_graph(4).path_metric())
    prod = product(single, m)
    for x in m.points:
        for y in m.points:
            assert prod.dist(("o", x), ("o", y)) == m.dist(x, y)


def test_edge_times_edge_is_the_unit_square():
    edge = MedianMetric.certify(path_graph(2).path_metric())
    square = product(edge, edge)
    c4 = MedianMetric.certify(cycle_graph(4).path_metric())
    v = c4.points
    ident = {("v0", "v0"): v[0], ("v0", "v1"): v[1],
             ("v1", "v1"): v[2], ("v1", "v0"): v[3]}
    for p in square.points:
        for q in square.points:
            assert square.dist(p, q) == c4.dist(ident[p], ident[q])


def test_product_median_is_componentwise_on_p3_grid():
    p3 = MedianMetric.certify(path_graph(3).path_metric())
    prod = product(p3, p3)          # the constructor asserts componentwise medians
    assert classify(prod).kind == "median"
    assert len(prod.points) == 9


# ---------------------------------------------------------------- lemmas

def test_colinear_lemma_holds_on_fixtures():
    for g in (random_tree(8, 3), cycle_graph(4), hypercube_graph(3)):
        m = MedianMetric.certify(g.path_metric())
        rep = check_colinear_lemma(m)
        assert rep.passed and rep.mode == "exhaustive"
        assert rep.checked > 0


def test_lipschitz_lemmas_hold_on_four_cycle_exhaustively():
    m = MedianMetric.certify(cycle_graph(4).path_metric())
    rep = check_median_lipschitz(m)
    assert rep.passed
    assert rep.near_median.mode == "exhaustive"
    assert rep.median_map.mode == "exhaustive"


def test_lipschitz_sampling_mode_above_cap():
    m = MedianMetric.certify(random_tree(14, 2).path_metric())
    rep = check_median_lipschitz(m, pair_cap=12, samples=2000, seed=5)
    assert rep.passed
    assert rep.median_map.mode == "sampled"
    assert rep.median_map.seed is not None


def test_lipschitz_part_two_oracle_small():
    """Direct ordered-sextuple scan must agree with the multiset reduction."""
    m = MedianMetric.certify(path_graph(3).path_metric())
    pts = m.points
    for tup in itertools.product(pts, repeat=6):
        x, y, z, x2, y2, z2 = tup
        lhs = m.dist(m.median_point(x, y, z), m.median_point(x2, y2, z2))
        rhs = m.dist(x, x2) + m.dist(y, y2) + m.dist(z, z2)
        assert lhs <= rhs
    assert check_median_lipschitz(m).passed


# ---------------------------------------------------------------- rectangles

def test_degenerate_rectangles_always_present():
    m = MedianMetric.certify(path_graph(4).path_metric())
    rects = find_rectangles(m)
    for x in m.points:
        for z in m.points:
            assert (x, x, z, z) in rects


def test_four_cycle_is_a_rectangle():
    m = MedianMetric.certify(cycle_graph(4).path_metric())
    v = m.points
    rects = find_rectangles(m)
    assert (v[0], v[1], v[2], v[3]) in rects


def test_trees_have_only_flat_rectangles():
    m = MedianMetric.certify(path_graph(4).path_metric())
    for x, y, z, t in find_rectangles(m):
        assert len({x, y, z, t}) <= 2


def test_rectangle_opposite_sides_equal():
    m = MedianMetric.certify(grid_graph(2, 3).path_metric())
    for x, y, z, t in find_rectangles(m):
        assert m.dist(x, y) == m.dist(z, t)
        assert m.dist(y, z) == m.dist(t, x)


# ---------------------------------------------------------------- l1 medians

def test_l1_vector_median_is_coordinatewise():
    vectors = [(i, j) for i in range(3) for j in range(3)]
    names = [f"{i}{j}" for i, j in vectors]
    rows = [[sum(abs(a - b) for a, b in zip(u, v)) for v in vectors]
            for u in vectors]
    m = MedianMetric.certify(FiniteMetric(names, rows))
    coord = dict(zip(names, vectors))
    for x, y, z in itertools.combinations(names, 3):
        med = m.median_point(x, y, z)
        want = tuple(sorted((coord[x][k], coord[y][k], coord[z][k]))[1]
                     for k in range(2))
        assert coord[med] == want


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_trees_certify_and_legs_hold(seed):
    m = MedianMetric.certify(random_tree(9, seed).path_metric())
    pts = m.points
    x, y, z = pts[0], pts[len(pts) // 2], pts[-1]
    md = m.median_point(x, y, z)
    assert m.dist(x, md) == (m.dist(x, y) + m.dist(x, z) - m.dist(y, z)) / 2
