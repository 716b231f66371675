import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from walklemma.graph import OrderedGraph, complete_graph, cycle_graph, empty_graph, path_graph, petersen_graph
from walklemma.oracle import restricted_table, shearer_membership_exact
from walklemma.supermodular import (PreconditionFailed, RegionNotViolated, SetFunctionTable,
                                    TableFormatError, extremal_construction, factorizes,
                                    format_table, generate_event_instance, is_supermodular,
                                    lll_radii, parse_table, product_lower_bound_holds,
                                    supermodular_lower_bound, supermodular_lower_bounds)

from conftest import graphs


def product_table(p):
    return SetFunctionTable.from_function(len(p), lambda s: float(np.prod([1 - p[i] for i in s])))


# -- supermodularity ----------------------------------------------------------

@given(st.lists(st.floats(0, 0.99), min_size=1, max_size=8))
def test_product_is_supermodular(p):
    assert is_supermodular(product_table(p)) == (True, None)


def test_constant_is_supermodular():
    assert is_supermodular(SetFunctionTable(3, np.ones(8)))[0]


def test_perturbed_cardinality_fails():
    t = SetFunctionTable(2, np.array([0.0, 1.0, 1.0, 1.5]))
    ok, w = is_supermodular(t)
    assert not ok
    assert (w.i, w.s, w.t) == (0, frozenset(), frozenset({1}))
    assert w.gap == pytest.approx(0.5)


def test_table_validation():
    with pytest.raises(ValueError):
        SetFunctionTable(2, np.ones(3))
    with pytest.raises(ValueError):
        SetFunctionTable(1, np.array([1.0, -0.1]))
    with pytest.raises(ValueError):
        SetFunctionTable(17, np.ones(1 << 17))


# -- factorization ------------------------------------------------------------

def test_edgeless_product_factorizes():
    p = [0.2, 0.5, 0.7]
    t = product_table(p)
    assert factorizes(t, empty_graph(3), p) == (True, None)
    bounds, holds = supermodular_lower_bounds(t, empty_graph(3), p)
    assert holds.all() and np.allclose(bounds, t.values, atol=1e-15)


@given(graphs(max_n=7), st.floats(0.1, 0.9))
def test_restricted_polynomial_factorizes(g, scale):
    p = np.linspace(0.05, 0.3, g.n)
    table = np.asarray(restricted_table(g, scale * p))
    if np.all(table > 0):
        assert factorizes(SetFunctionTable(g.n, table), g, scale * p)[0]


def test_isolated_vertex_violation():
    t = SetFunctionTable(2, np.array([1.0, 0.4, 1.0, 0.4]))
    assert factorizes(t, empty_graph(2), [0.5, 0.0]) == (False, (0, frozenset()))


# -- lower bound --------------------------------------------------------------

def test_bound_at_empty_set():
    g, p = path_graph(3), [0.2, 0.2, 0.2]
    t = generate_event_instance(g, p, seed=1)
    bound, holds = supermodular_lower_bound(t, g, p, set())
    assert bound == t.values[0] and holds


@given(graphs(max_n=7), st.integers(0, 10 ** 6))
def test_bound_on_generated_instances(g, seed):
    assume_edges = len(g.edges()) <= 12
    if not assume_edges:
        return
    rng = np.random.default_rng(seed)
    p = rng.uniform(0, 0.6 / max(1, max(g.degree(i) for i in range(g.n))), g.n)
    if not shearer_membership_exact(g, p).member:
        return
    t = generate_event_instance(g, p, seed)
    _, holds = supermodular_lower_bounds(t, g, p)
    assert holds.all()


def test_bound_is_tight_for_the_polynomial():
    g, p = cycle_graph(5), [0.15] * 5
    t = SetFunctionTable(5, np.asarray(restricted_table(g, p)))
    bounds, holds = supermodular_lower_bounds(t, g, p)
    assert holds.all()
    assert np.allclose(bounds, t.values, rtol=1e-12)


def test_preconditions():
    g, p = path_graph(2), [0.3, 0.3]
    with pytest.raises(PreconditionFailed) as err:
        supermodular_lower_bound(SetFunctionTable(2, np.array([0.0, 0.0, 0.0, 0.0])), g, p, {0})
    assert err.value.check == "f(empty) > 0"
    with pytest.raises(PreconditionFailed) as err:
        supermodular_lower_bound(SetFunctionTable(2, np.ones(4)), g, [0.6, 0.6], {0})
    assert err.value.check == "activity vector in the region"
    with pytest.raises(PreconditionFailed) as err:
        supermodular_lower_bound(SetFunctionTable(2, np.array([0.0, 1.0, 1.0, 1.5]) + 1), g, p, {0})
    assert err.value.check == "supermodular"
    with pytest.raises(PreconditionFailed) as err:
        supermodular_lower_bound(SetFunctionTable(2, np.array([1.0, 0.5, 1.0, 0.5])),
                                 empty_graph(2), p, {0})
    assert err.value.check == "factorizes"


# -- extremal tables ----------------------------------------------------------

def test_extremal_single_edge():
    lam, t = extremal_construction(path_graph(2), [0.6, 0.6])
    assert lam == pytest.approx(1 / 1.2, abs=1e-9)
    assert t.values[3] == pytest.approx(0, abs=1e-9)


def test_extremal_triangle():
    lam, t = extremal_construction(complete_graph(3), [0.4] * 3)
    assert lam == pytest.approx(1 / 1.2, abs=1e-9)
    assert t.values.min() <= 1e-9
    assert is_supermodular(t)[0]
    assert factorizes(t, complete_graph(3), lam * np.full(3, 0.4))[0]


def test_extremal_requires_violation():
    with pytest.raises(RegionNotViolated):
        extremal_construction(empty_graph(1), [0.5])


# -- instance generator -------------------------------------------------------

def test_edgeless_instance_is_product():
    p = [0.1, 0.4, 0.3]
    t = generate_event_instance(empty_graph(3), p)
    assert np.allclose(t.values, product_table(p).values, atol=1e-15)


@pytest.mark.parametrize("g, p, seed", [
    (path_graph(2), [0.3, 0.4], 0),
    (path_graph(4), [0.1, 0.2, 0.15, 0.1], 11),
    (petersen_graph(), [0.05] * 10, 3),
    # vertex 1 is isolated
    (OrderedGraph.from_edges(4, [(0, 2), (0, 3)]), [0.05, 0.04, 0.11, 0.03], 107954),
])
def test_generated_instances_pass_both_checks(g, p, seed):
    t = generate_event_instance(g, p, seed)
    assert is_supermodular(t)[0]
    assert factorizes(t, g, p)[0]
    assert t.values[0] == pytest.approx(1.0)
    # the marginals are p
    for i in range(g.n):
        assert 1 - t.values[1 << i] == pytest.approx(p[i], abs=1e-12)


def test_generated_single_edge_is_correlated():
    t = generate_event_instance(path_graph(2), [0.3, 0.4], seed=0)
    assert t.values[3] != pytest.approx(0.7 * 0.6, abs=1e-6)


def test_generator_validation():
    with pytest.raises(ValueError):
        generate_event_instance(path_graph(2), [0.5])
    with pytest.raises(ValueError):
        generate_event_instance(path_graph(2), [0.5, 1.0])
    with pytest.raises(ValueError):
        generate_event_instance(complete_graph(7), [0.01] * 7)


# -- local lemma consequences -------------------------------------------------

@given(graphs(max_n=8), st.integers(0, 10 ** 6))
def test_product_bounds_from_radii(g, seed):
    if len(g.edges()) > 12:
        return
    rng = np.random.default_rng(seed)
    dmax = max([g.degree(i) for i in range(g.n)] + [1])
    p = rng.uniform(0, 0.9 * dmax ** dmax / (dmax + 1) ** (dmax + 1), g.n)
    r = lll_radii(g, p)
    if r is None:
        return
    assert np.all(r < 1)
    assert product_lower_bound_holds(generate_event_instance(g, p, seed), r)
    z = SetFunctionTable(g.n, np.asarray(restricted_table(g, p)))
    assert product_lower_bound_holds(z, r)


def test_lll_radii_fail_outside():
    assert lll_radii(complete_graph(3), [0.4] * 3) is None
    r = lll_radii(path_graph(2), [0.2, 0.2])
    assert r is not None and np.all(r[0] * (1 - r[1]) >= 0.2)


# -- table files --------------------------------------------------------------

@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=8, max_size=8))
def test_table_round_trip(values):
    t = SetFunctionTable(3, np.array(values))
    assert np.array_equal(parse_table(format_table(t)).values, t.values)


@pytest.mark.parametrize("text", [
    "", "x\n", "1\n0 1.0\n", "1\n0 1.0\n0 1.0\n1 2\n", "1\n0 1\n2 1\n", "1\n0 1\n1 -1\n",
    "1\n0 1 2\n", "17\n",
])
def test_table_parse_errors(text):
    with pytest.raises(TableFormatError):
        parse_table(text)
