import os
import sys
import random

import pytest
from hypothesis import HealthCheck, settings

from specgap.graph import Graph, is_connected

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_connected_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    """Random spanning tree plus independent extra edges, so always connected."""
    p = rng.random() if p is None else p
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    g = Graph.from_edges(n, edges)
    assert is_connected(g)
    return g


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
