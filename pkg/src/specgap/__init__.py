"""Spectral gap of the normalized Laplacian around 1, with exhaustive checks on small graphs."""

from .canon import automorphism_count, canonical_form, isomorph_free_connected
from .enumeration import (
    CheckReport,
    EnumReport,
    isomorph_free_stream,
    labeled_connected_stream,
    verify_degree_bound,
    verify_gap_theorem,
    verify_lemma1,
    verify_max_dist,
    verify_neighborhood_theorem,
)
from .errors import DomainError, GraphError, NumericError, ParseError, SpecgapError, UsageError
from .formats import from_edge_list, from_graph6, parse_graph, to_edge_list, to_graph6
from .graph import (
    OTHER,
    Book,
    FamilyTag,
    Graph,
    Petal,
    book,
    classify_family,
    complete,
    complete_bipartite,
    components,
    cycle,
    degree,
    is_bipartite,
    is_connected,
    make_family,
    path,
    petal,
    recognize_family,
)
from .linalg import Spectrum, SymMatrix, cluster, eigenvalues_sym, min_abs_deviation
from .spectral import (
    GapReport,
    build_M,
    build_M_by_squaring,
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
    verify_eigenfunction,
)

__version__ = "0.1.0"
