import numpy as np
import pytest

from sbmwalk.sbm import graph_from_edges


@pytest.fixture
def triangle():
    return graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return graph_from_edges(3, [(0, 1), (1, 2)])


def random_connected_graph(n, p, rng):
    """Spanning tree plus extra Bernoulli(p) edges, so the result is connected."""
    edges = {(min(i, int(rng.integers(i))), i) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((i, j))
    return graph_from_edges(n, sorted(edges))
