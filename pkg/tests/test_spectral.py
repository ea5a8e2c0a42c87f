import math

import numpy as np
import pytest

from oracles import numpy_spectrum
from specgap.errors import DomainError, UsageError
from specgap.graph import (
    Book,
    FamilyTag,
    Graph,
    OTHER,
    Petal,
    book,
    complete,
    complete_bipartite,
    cycle,
    make_family,
    path,
    petal,
)
from specgap.spectral import (
    build_M,
    build_M_by_squaring,
    deg3_neighbor_filter,
    degree_bound_epsilon,
    epsilon_direct,
    epsilon_via_M,
    family_eigenfunctions,
    gap_minimizer,
    max_dist_from_one,
    neighborhood_gap_check,
    neighborhood_laplacian,
    normalized_laplacian_sym,
    random_walk_laplacian,
    rayleigh_gap_quotient,
    spectrum_of,
    symmetric_difference_margin,
    verify_eigenfunction,
)


def groups(g):
    return [(round(v, 9), k) for v, k in spectrum_of(g).groups]


def test_two_vertices():
    assert np.allclose(spectrum_of(path(2)).values, [0.0, 2.0], atol=1e-15)
    assert epsilon_direct(path(2)).epsilon == pytest.approx(1.0)


def test_petal4_groups():
    rep = epsilon_direct(petal(4))
    assert groups(petal(4)) == [(0.0, 1), (0.5, 3), (1.5, 5)]
    assert rep.epsilon == pytest.approx(0.5, abs=1e-12)
    assert rep.family == Petal(4)
    assert rep.achieves_half


def test_book2_is_c6():
    assert groups(book(2)) == [(0.0, 1), (0.5, 2), (1.5, 2), (2.0, 1)]
    assert groups(cycle(6)) == groups(book(2))


def test_k3():
    assert groups(complete(3)) == [(0.0, 1), (1.5, 2)]
    assert epsilon_direct(complete(3)).epsilon == pytest.approx(0.5)


def test_cycle4_has_eigenvalue_one():
    rep = epsilon_direct(cycle(4))
    assert rep.epsilon < 1e-12
    assert not rep.achieves_half
    assert rep.family == OTHER


def test_complete_graph():
    n = 7
    assert groups(complete(n)) == [(0.0, 1), (round(n / (n - 1), 9), n - 1)]


def test_matches_lapack_on_families():
    for g in [petal(5), book(4), cycle(9), complete_bipartite(3, 4), path(7)]:
        assert np.max(np.abs(np.array(spectrum_of(g).values) - numpy_spectrum(g))) < 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        spectrum_of(Graph.from_edges(4, [(0, 1), (2, 3)]))
    with pytest.raises(DomainError):
        spectrum_of(Graph(1, (0,)))
    with pytest.raises(DomainError):
        normalized_laplacian_sym(Graph.from_edges(3, [(0, 1)]))
    with pytest.raises(DomainError):
        epsilon_via_M(Graph.from_edges(4, [(0, 1), (2, 3)]))


def test_M_entries_petal():
    m = build_M(petal(2)).entries
    assert m[0, 0] == pytest.approx(0.5)
    assert m[1, 1] == pytest.approx(3 / 8)
    assert m[1, 2] == pytest.approx(1 / 8)
    assert m[0, 1] == pytest.approx(1 / (2 * math.sqrt(8)))
    assert np.max(np.abs(m - build_M_by_squaring(petal(2)))) < 1e-15


@pytest.mark.parametrize("g", [complete(3), cycle(4), cycle(5), petal(3), book(3), complete_bipartite(2, 5), path(2)])
def test_epsilon_via_M_agrees(g):
    assert abs(epsilon_via_M(g) - epsilon_direct(g).epsilon) <= 1e-8


def test_rayleigh_examples():
    # constant function on the triangle: each w sees 2, so sum 4/2 * 3 = 6 over 2*3 = 6
    assert rayleigh_gap_quotient(complete(3), [1, 1, 1]) == pytest.approx(1.0)
    with pytest.raises(UsageError):
        rayleigh_gap_quotient(complete(3), [0, 0, 0])
    with pytest.raises(UsageError):
        rayleigh_gap_quotient(complete(3), [1, 1])


@pytest.mark.parametrize("g", [cycle(5), petal(2), book(3), complete(5), complete_bipartite(2, 3)])
def test_gap_minimizer_attains_eps_squared(g):
    f = gap_minimizer(g)
    eps = epsilon_direct(g).epsilon
    assert rayleigh_gap_quotient(g, f) == pytest.approx(eps**2, abs=1e-9)


def test_random_walk_laplacian_constant_is_zero():
    assert np.allclose(random_walk_laplacian(petal(3), np.ones(7)), 0)


def test_verify_eigenfunction_rejects_wrong_lambda():
    f, lam = family_eigenfunctions(Petal(3))[0]
    assert verify_eigenfunction(petal(3), f, lam) < 1e-12
    assert verify_eigenfunction(petal(3), f, lam + 0.1) > 0.09


@pytest.mark.parametrize("tag", [Petal(1), Petal(2), Petal(6), Book(1), Book(2), Book(5)])
def test_family_eigenfunctions(tag):
    g = make_family(tag)
    pairs = family_eigenfunctions(tag)
    for f, lam in pairs:
        assert verify_eigenfunction(g, f, lam) <= 1e-12
    m = tag.params[0]
    halves = sum(1 for _, lam in pairs if lam == 0.5)
    threes = sum(1 for _, lam in pairs if lam == 1.5)
    if tag.kind == "Petal":
        assert (halves, threes) == (m - 1, m + 1)
    else:
        assert (halves, threes) == (m, m)
    # the listed functions for one eigenvalue are linearly independent
    for lam in (0.5, 1.5):
        fs = np.array([f for f, l in pairs if l == lam])
        if len(fs):
            assert np.linalg.matrix_rank(fs) == len(fs)


def test_family_eigenfunctions_other():
    with pytest.raises(UsageError):
        family_eigenfunctions(FamilyTag("Cycle", (5,)))


def test_max_dist_bounds():
    assert max_dist_from_one(complete(6)) == pytest.approx(1 / 5)
    assert max_dist_from_one(cycle(6)) == pytest.approx(1.0)
    v = max_dist_from_one(petal(3))
    assert 1 / 6 < v < 1


def test_degree_bound():
    assert degree_bound_epsilon(complete(4)) == pytest.approx(math.sqrt(2) / 3)
    assert degree_bound_epsilon(cycle(7)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        degree_bound_epsilon(path(4))
    assert epsilon_direct(complete(4)).epsilon <= math.sqrt(2) / 3


def test_neighborhood_examples():
    assert neighborhood_gap_check(petal(2), 2) == (pytest.approx(0.25), True)
    d, ok = neighborhood_gap_check(cycle(4), 5)
    assert d < 1e-12 and ok
    for g in [cycle(5), complete(4), complete_bipartite(2, 3)]:
        d, ok = neighborhood_gap_check(g, 1)
        assert ok and d <= 0.5 + 1e-9
    with pytest.raises(UsageError):
        neighborhood_laplacian(cycle(5), 0)


def test_neighborhood_ell_one_is_laplacian():
    g = book(3)
    assert np.allclose(neighborhood_laplacian(g, 1).entries, normalized_laplacian_sym(g).entries)


@pytest.mark.parametrize("ell", range(1, 11))
def test_neighborhood_sharp_on_families(ell):
    for g in (petal(3), book(3)):
        d, ok = neighborhood_gap_check(g, ell)
        assert ok
        assert d == pytest.approx(0.5**ell, rel=1e-9, abs=1e-15)


def test_symmetric_difference_margin():
    g = petal(2)
    # v1 = 1 and w1 = 3 share the apex; N(1) ^ N(3) = {1, 3}, both degree 2
    assert symmetric_difference_margin(g, 1, 3) == pytest.approx(0.5)
    assert symmetric_difference_margin(path(4), 0, 3) is None
    with pytest.raises(UsageError):
        symmetric_difference_margin(g, 0, 9)


def test_margin_at_least_half_on_extremal_graphs():
    for g in (petal(4), book(4)):
        for u in range(g.n):
            for v in range(u + 1, g.n):
                s = symmetric_difference_margin(g, u, v)
                assert s is None or s >= 0.5 - 1e-12


def test_deg3_filter():
    assert deg3_neighbor_filter(petal(5))
    assert not deg3_neighbor_filter(complete(5))
