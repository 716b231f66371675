import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from walklemma.graph import (OrderedGraph, complete_graph, cycle_graph, empty_graph, path_graph,
                             petersen_graph)
from walklemma.oracle import (DivergentRatio, OracleCapExceeded, avoid_value, critical_bracket,
                              critical_lambda_exact, ind_poly, ind_poly_enumerate,
                              ind_poly_recurrence, ind_poly_restricted, independent_sets, ratio,
                              restricted_table, shearer_membership_exact)

from conftest import graphs, random_graph

SINGLE_EDGE = OrderedGraph.from_edges(2, [(0, 1)])


# -- independent set polynomial ----------------------------------------------

def test_edgeless_factorizes():
    p = 0.3
    assert ind_poly(empty_graph(3), [-p] * 3) == pytest.approx((1 - p) ** 3, abs=1e-15)


def test_single_edge():
    assert ind_poly(SINGLE_EDGE, [-0.3, -0.4]) == pytest.approx(0.3, abs=1e-15)


def test_triangle():
    assert ind_poly(complete_graph(3), [-0.2] * 3) == pytest.approx(0.4, abs=1e-15)
    assert sorted(independent_sets(complete_graph(3))) == [0, 1, 2, 4]


def test_restricted_values():
    g = path_graph(3)
    p = [0.2, 0.2, 0.2]
    assert ind_poly_restricted(g, p, set()) == 1
    for i in range(3):
        assert ind_poly_restricted(g, p, {i}) == pytest.approx(0.8)
    assert ind_poly_restricted(g, p, {0, 1, 2}) == pytest.approx(0.44, abs=1e-15)
    assert ind_poly_restricted(g, [Fraction(1, 5)] * 3, {0, 1, 2}) == Fraction(11, 25)


def test_method_validation():
    with pytest.raises(ValueError):
        ind_poly(path_graph(2), [0.1, 0.1], method="magic")
    with pytest.raises(ValueError):
        ind_poly(path_graph(2), [0.1])
    with pytest.raises(OracleCapExceeded):
        ind_poly_enumerate(empty_graph(25), [0.0] * 25)


@given(graphs(max_n=12), st.data())
def test_enumeration_matches_recurrence(g, data):
    x = data.draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=g.n, max_size=g.n))
    a, b = ind_poly_enumerate(g, x), ind_poly_recurrence(g, x)
    scale = ind_poly_recurrence(g, [abs(v) for v in x])
    assert abs(a - b) <= 1e-12 * scale


@given(graphs(max_n=8), st.data())
def test_deletion_identity_exact(g, data):
    p = [Fraction(data.draw(st.integers(0, 99)), 100) for _ in range(g.n)]
    i = data.draw(st.integers(0, g.n - 1))
    s = data.draw(st.sets(st.sampled_from(range(g.n)))) - {i}
    z = lambda t: ind_poly_restricted(g, p, t)
    assert z(s | {i}) == z(s) - p[i] * z(s - set(g.adj[i]))


@given(graphs(max_n=7), st.data())
def test_telescoping_any_order(g, data):
    p = [Fraction(data.draw(st.integers(0, 30)), 100) for _ in range(g.n)]
    s = sorted(data.draw(st.sets(st.sampled_from(range(g.n)), min_size=1)))
    order = data.draw(st.permutations(s))
    prod, seen = Fraction(1), set()
    try:
        for j in order:
            r = ratio(g, p, j, seen)
            assume(r < 1)
            prod *= 1 - r
            seen.add(j)
    except DivergentRatio:
        assume(False)
    assert prod == ind_poly_restricted(g, p, s)


# -- membership ---------------------------------------------------------------

def test_clique_membership():
    assert shearer_membership_exact(complete_graph(3), [0.3] * 3).member
    v = shearer_membership_exact(complete_graph(3), [0.4] * 3)
    assert not v.member and v.witness == {0, 1, 2}


def test_edgeless_always_member():
    assert shearer_membership_exact(empty_graph(4), [0.99, 0.5, 0.0, 0.7]).member


def test_membership_rejects_bad_probability():
    with pytest.raises(ValueError):
        shearer_membership_exact(path_graph(2), [0.5, 1.0])


@given(graphs(max_n=8), st.data())
def test_membership_is_monotone(g, data):
    p = data.draw(st.lists(st.floats(0, 0.6), min_size=g.n, max_size=g.n))
    q = [v * data.draw(st.floats(0, 1)) for v in p]
    if shearer_membership_exact(g, p).member:
        assert shearer_membership_exact(g, q).member


@given(graphs(max_n=8), st.data())
def test_float_table_matches_exact(g, data):
    p = data.draw(st.lists(st.floats(0, 0.6), min_size=g.n, max_size=g.n))
    exact = restricted_table(g, p, exact=True)
    approx = restricted_table(g, p)
    assert np.allclose(approx, [float(v) for v in exact], atol=1e-12)


def test_witness_is_smallest():
    g = OrderedGraph.from_edges(4, [(0, 1), (2, 3)])
    v = shearer_membership_exact(g, [0.6, 0.6, 0.1, 0.1])
    assert v.witness == {0, 1}


# -- ratio, avoid -------------------------------------------------------------

def test_ratio_examples():
    p = [0.3, 0.4]
    assert ratio(path_graph(3), [0.2] * 3, 1, set()) == 0.2
    assert ratio(SINGLE_EDGE, p, 0, {1}) == pytest.approx(0.3 / 0.6)
    quotient = 1 - ind_poly_restricted(SINGLE_EDGE, p, {0, 1}) / ind_poly_restricted(SINGLE_EDGE, p, {1})
    assert ratio(SINGLE_EDGE, p, 0, {1}) == pytest.approx(quotient)


def test_ratio_on_violated_triangle():
    g, p = complete_graph(3), [0.4] * 3
    expected = 1 - ind_poly_restricted(g, p, {0, 1, 2}) / ind_poly_restricted(g, p, {0, 1})
    try:
        value = ratio(g, p, 2, {0, 1})
    except DivergentRatio:
        return
    assert value == pytest.approx(expected) and value >= 1


def test_ratio_rejects_member_of_s():
    with pytest.raises(ValueError):
        ratio(SINGLE_EDGE, [0.1, 0.1], 0, {0})


def test_avoid_value():
    assert avoid_value(empty_graph(2), [0.5, 0.5]) == pytest.approx(0.25)
    assert avoid_value(complete_graph(3), [0.4] * 3) is None
    assert avoid_value(empty_graph(1), [0.0]) == 1


# -- critical activity --------------------------------------------------------

def test_critical_single_edge():
    lam = critical_lambda_exact(path_graph(2))
    assert 0.5 - 1e-8 < lam < 0.5
    # subset scan: every subset positive just below, the full set fails just above
    assert np.all(restricted_table(path_graph(2), [lam, lam]) > 0)
    assert restricted_table(path_graph(2), [0.5 + 1e-8] * 2)[-1] < 0


def test_critical_single_vertex():
    assert critical_lambda_exact(empty_graph(1)) == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("n", range(1, 7))
def test_critical_clique(n):
    assert critical_lambda_exact(complete_graph(n)) == pytest.approx(1 / n, abs=1e-8)


# Smallest positive root of Z_G(-lambda), from numpy.roots on independence
# polynomial coefficients counted by networkx clique enumeration on the
# complement graph.
FROZEN_LAMBDA_C = {
    "path4": (path_graph(4), 0.3333333333333333),
    "cycle5": (cycle_graph(5), 0.27639320225002106),
    "cycle6": (cycle_graph(6), 0.2679491924311227),
    "petersen": (petersen_graph(), 0.1811545953638781),
    "k23": (OrderedGraph.from_edges(5, [(i, j) for i in (0, 1) for j in (2, 3, 4)]),
            0.24512233375330725),
    "star4": (OrderedGraph.from_edges(5, [(0, j) for j in range(1, 5)]), 0.27550804099948445),
}


@pytest.mark.parametrize("name", sorted(FROZEN_LAMBDA_C))
def test_critical_against_frozen_roots(name):
    g, expected = FROZEN_LAMBDA_C[name]
    lo, hi = critical_bracket(g, tol=1e-10)
    assert lo <= expected + 1e-12 and expected <= hi + 1e-12
    assert hi - lo < 1e-10


def test_weighted_bracket():
    lo, hi = critical_bracket(path_graph(2), tol=1e-10, weights=[0.6, 0.6])
    assert lo == pytest.approx(1 / 1.2, abs=1e-9)


def test_random_graphs_bracket_contains_root():
    rng = random.Random(7)
    for _ in range(10):
        g = random_graph(rng, rng.randint(2, 9))
        lo, hi = critical_bracket(g, tol=1e-9)
        assert shearer_membership_exact(g, [lo] * g.n).member
        if hi < 1:
            assert not shearer_membership_exact(g, [hi] * g.n).member
