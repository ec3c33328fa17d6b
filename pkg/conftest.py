"""Shared fixtures: small named graphs with known invariants."""

from __future__ import annotations

import pytest

from graph_core import (Graph, complete_bipartite_graph, complete_graph, cycle_graph,
                        disjoint_union, hypercube_graph, petersen_graph, prism_graph)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive acceptance checks (deselect with -m 'not slow')")


@pytest.fixture
def k4() -> Graph:
    return complete_graph(4)


@pytest.fixture
def c4() -> Graph:
    return cycle_graph(4)


@pytest.fixture
def c6() -> Graph:
    return cycle_graph(6)


@pytest.fixture
def petersen() -> Graph:
    return petersen_graph()


@pytest.fixture
def q3() -> Graph:
    return hypercube_graph(3)


@pytest.fixture
def k33() -> Graph:
    return complete_bipartite_graph(3, 3)


@pytest.fixture
def prism() -> Graph:
    return prism_graph()


@pytest.fixture
def two_triangles() -> Graph:
    return disjoint_union(complete_graph(3), complete_graph(3))


@pytest.fixture
def two_k4() -> Graph:
    return disjoint_union(complete_graph(4), complete_graph(4))
