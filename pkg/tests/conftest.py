import itertools

import pytest

from mediankit import certify_median_graph
from mediankit.algebra import FiniteMedianAlgebra, IntervalStructure
from mediankit.corpus import graph_instances, median_graph_instances

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, description: str, ok: bool, seconds: float):
    line = (f"criterion {number:02d} {'PASS' if ok else 'FAIL'} "
            f"({seconds:6.2f}s)  {description}")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def boolean_median_algebra(k: int) -> FiniteMedianAlgebra:
    """P({0..k-1}) with [A,B] = {C : A&B <= C <= A|B}."""
    universe = list(range(k))
    points = [frozenset(s) for r in range(k + 1)
              for s in itertools.combinations(universe, r)]
    table = {}
    for a in points:
        for b in points:
            lo, hi = a & b, a | b
            table[(a, b)] = frozenset(c for c in points if lo <= c <= hi)
    return FiniteMedianAlgebra.promote(IntervalStructure(points, table))


@pytest.fixture(scope="session")
def boolean2():
    return boolean_median_algebra(2)


@pytest.fixture(scope="session")
def boolean3():
    return boolean_median_algebra(3)


@pytest.fixture(scope="session")
def corpus_graphs():
    return {inst.name: inst for inst in graph_instances()}


@pytest.fixture(scope="session")
def median_certs():
    """Certificates for every median graph in the corpus (built once)."""
    return {inst.name: certify_median_graph(inst.payload)
            for inst in median_graph_instances()}


@pytest.fixture(scope="session")
def median_metrics(median_certs):
    return {name: cert.metric for name, cert in median_certs.items()}


@pytest.fixture(scope="session")
def small_median_metrics(median_metrics):
    return {name: m for name, m in median_metrics.items() if len(m.points) <= 12}
