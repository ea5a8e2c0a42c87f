"""Invariants checked on random connected graphs."""

import math

import numpy as np
from hypothesis import assume, given, strategies as st

from oracles import numpy_spectrum
from specgap.canon import canonical_form
from specgap.graph import Graph, classify_family, is_bipartite, is_connected
from specgap.spectral import (
    build_M,
    build_M_by_squaring,
    deg3_neighbor_filter,
    epsilon_direct,
    epsilon_via_M,
    max_dist_from_one,
    neighborhood_gap_check,
    rayleigh_gap_quotient,
    spectrum_of,
    symmetric_difference_margin,
)


@st.composite
def connected_graphs(draw, min_n=2, max_n=10):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = {(p, i) for i, p in enumerate(parents, start=1)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))
    perm = draw(st.permutations(range(n)))
    g = Graph.from_edges(n, edges | set(extra))
    return g.relabel(perm)


@given(connected_graphs())
def test_spectrum_basic_facts(g):
    s = np.array(spectrum_of(g).values)
    assert abs(s[0]) < 1e-12
    assert s[1] > 1e-9  # connected: 0 is simple
    assert np.all(s > -1e-12) and np.all(s < 2 + 1e-12)
    assert abs(s.sum() - g.n) < 1e-9
    assert (abs(s[-1] - 2) < 1e-9) == is_bipartite(g)
    assert np.max(np.abs(s - numpy_spectrum(g))) < 1e-11


@given(connected_graphs(min_n=3), st.randoms(use_true_random=False))
def test_epsilon_invariant_under_relabeling(g, rnd):
    eps = epsilon_direct(g).epsilon
    tag = classify_family(g)
    key = canonical_form(g)
    for _ in range(5):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        h = g.relabel(perm)
        assert abs(epsilon_direct(h).epsilon - eps) < 1e-12
        assert classify_family(h) == tag
        assert canonical_form(h) == key


@given(connected_graphs(min_n=3))
def test_gap_at_most_half(g):
    rep = epsilon_direct(g)
    assert rep.epsilon <= 0.5 + 1e-8
    if rep.achieves_half:
        assert rep.family.is_extremal


@given(connected_graphs())
def test_M_entrywise_equals_square(g):
    assert np.max(np.abs(build_M(g).entries - build_M_by_squaring(g))) <= 1e-12
    assert abs(epsilon_via_M(g) - epsilon_direct(g).epsilon) <= 1e-8


@given(connected_graphs(), st.data())
def test_rayleigh_quotient_at_least_eps_squared(g, data):
    eps = epsilon_direct(g).epsilon
    f = data.draw(st.lists(st.floats(-1e3, 1e3), min_size=g.n, max_size=g.n))
    assume(np.linalg.norm(f) > 1e-6)
    assert rayleigh_gap_quotient(g, f) >= eps * eps - 1e-9


@given(connected_graphs(min_n=3))
def test_max_dist_range(g):
    v = max_dist_from_one(g)
    assert 1 / (g.n - 1) - 1e-9 <= v <= 1 + 1e-9


@given(connected_graphs(min_n=3, max_n=8), st.integers(1, 10))
def test_neighborhood_bound(g, ell):
    d, ok = neighborhood_gap_check(g, ell)
    assert ok
    assert d <= 0.5**ell + 1e-9
    # min over eigenvalues of |1 - lam|^ell equals the order-ell distance
    assert math.isclose(d, epsilon_direct(g).epsilon ** ell, rel_tol=1e-6, abs_tol=1e-12)


@given(connected_graphs(min_n=3))
def test_filter_and_margin_consistent_with_gap(g):
    eps = epsilon_direct(g).epsilon
    if not deg3_neighbor_filter(g):
        assert eps < 0.5 - 1e-9
    if eps >= 0.5 - 1e-9:
        for u in range(g.n):
            for v in range(u + 1, g.n):
                s = symmetric_difference_margin(g, u, v)
                assert s is None or s >= 0.5 - 1e-9


def test_connected_strategy_sanity():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert is_connected(g)
