import os
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from walklemma.graph import OrderedGraph

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=1, max_n=7, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if connected:
        # a random spanning tree keeps it connected
        perm = draw(st.permutations(range(n)))
        for k in range(1, n):
            j = draw(st.integers(0, k - 1))
            a, b = sorted((perm[k], perm[j]))
            if (a, b) not in chosen:
                chosen.append((a, b))
    return OrderedGraph.from_edges(n, chosen)


def activities(n, hi=0.5):
    return st.lists(st.floats(0.0, hi, allow_nan=False), min_size=n, max_size=n)


def random_graph(rng: random.Random, n: int, density: float = 0.4) -> OrderedGraph:
    return OrderedGraph.from_edges(
        n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density])


@pytest.fixture
def rng():
    return random.Random(12345)
