"""Normalized-Laplacian spectra, the gap from 1, and the quantities built around it.

Spectra come from the symmetric conjugate ``I - D^{-1/2} A D^{-1/2}``, which is
similar to the random-walk Laplacian ``f(v) - mean_{w~v} f(w)`` and so has the
same eigenvalues. :func:`verify_eigenfunction` uses the random-walk form on
purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, NumericError, UsageError
from .graph import FamilyTag, Graph, classify_family, is_bipartite, is_connected
from .linalg import CLUSTER_TOL, Spectrum, SymMatrix, eigenvalues_sym, min_abs_deviation

HALF_TOL = 1e-8
M_NEGATIVE_CLAMP = 1e-12
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class GapReport:
    epsilon: float
    nearest_eigenvalue: float
    spectrum: Spectrum
    family: FamilyTag
    achieves_half: bool

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "nearest_eigenvalue": self.nearest_eigenvalue,
            "eigenvalues": list(self.spectrum.values),
            "groups": [[v, k] for v, k in self.spectrum.groups],
            "family": str(self.family),
            "achieves_half": self.achieves_half,
        }


def _degrees_or_fail(g: Graph) -> np.ndarray:
    deg = np.array(g.degrees, dtype=float)
    if np.any(deg == 0):
        v = int(np.flatnonzero(deg == 0)[0])
        raise DomainError(f"vertex {v} is isolated; the normalized Laplacian is undefined")
    return deg


def _adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1.0
    return a


def normalized_laplacian_sym(g: Graph) -> SymMatrix:
    deg = _degrees_or_fail(g)
    lap = np.eye(g.n)
    for u, v in g.edges():
        lap[u, v] = lap[v, u] = -1.0 / math.sqrt(deg[u] * deg[v])
    return SymMatrix(lap)


def _function(g: Graph, f: Sequence[float]) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise UsageError(f"function vector must have length {g.n}")
    if not np.any(f):
        raise UsageError("function vector is identically zero")
    return f


def spectrum_of(g: Graph, tol: float = CLUSTER_TOL) -> Spectrum:
    if not is_connected(g):
        raise DomainError("graph is disconnected")
    if g.n == 1:
        raise DomainError("a single vertex has no normalized Laplacian")
    return eigenvalues_sym(normalized_laplacian_sym(g), tol)


def epsilon_direct(g: Graph, tol_half: float = HALF_TOL, tol_cluster: float = CLUSTER_TOL) -> GapReport:
    """Distance from 1 to the nearest normalized-Laplacian eigenvalue."""
    spec = spectrum_of(g, tol_cluster)
    eps, i = min_abs_deviation(spec, 1.0)
    return GapReport(
        epsilon=eps,
        nearest_eigenvalue=spec[i],
        spectrum=spec,
        family=classify_family(g),
        achieves_half=abs(eps - 0.5) <= tol_half,
    )


def build_M(g: Graph) -> SymMatrix:
    """``(I - D^{-1/2} A D^{-1/2})^2`` from the common-neighbour sum, entry by entry.

    ``M[u, v] = sum_{w in N(u) & N(v)} 1 / (deg w * sqrt(deg u * deg v))``.
    """
    deg = _degrees_or_fail(g)
    n = g.n
    m = np.zeros((n, n))
    for u in range(n):
        for v in range(u + 1):
            common = g.adj[u] & g.adj[v]
            s = 0.0
            while common:
                low = common & -common
                s += 1.0 / deg[low.bit_length() - 1]
                common ^= low
            m[u, v] = m[v, u] = s / math.sqrt(deg[u] * deg[v])
    return SymMatrix(m)


def build_M_by_squaring(g: Graph) -> np.ndarray:
    deg = _degrees_or_fail(g)
    s = 1.0 / np.sqrt(deg)
    normalized_adj = s[:, None] * _adjacency(g) * s[None, :]
    return normalized_adj @ normalized_adj


def epsilon_via_M(g: Graph) -> float:
    """The gap from 1 as the square root of the smallest eigenvalue of M."""
    if not is_connected(g):
        raise DomainError("graph is disconnected")
    m = build_M(g).entries
    mu = eigenvalues_sym(m)[0]
    if mu < -M_NEGATIVE_CLAMP:
        raise NumericError(f"smallest eigenvalue of M is {mu:.3e}; M must be positive semidefinite")
    n = g.n
    rows = np.array(g.adj, dtype=np.int64)
    deg = np.array(g.degrees, dtype=np.int64)
    mu = _kernels.refine_m_min(np.ascontiguousarray(m), n, float(mu), rows, deg,
                               np.zeros((n, n)), np.zeros(n), np.zeros(n))
    return math.sqrt(mu)


def rayleigh_gap_quotient(g: Graph, f: Sequence[float]) -> float:
    """``sum_w (1/deg w) (sum_{v~w} f(v))^2 / sum_w deg w f(w)^2``; never below eps^2."""
    deg = _degrees_or_fail(g)
    f = _function(g, f)
    num = 0.0
    for w in range(g.n):
        s = sum(f[v] for v in g.neighbors(w))
        num += s * s / deg[w]
    return num / float(np.dot(deg, f * f))


def gap_minimizer(g: Graph) -> np.ndarray:
    """A function attaining the minimum of :func:`rayleigh_gap_quotient`.

    Inverse iteration on M at its smallest eigenvalue, mapped back by ``D^{-1/2}``.
    """
    deg = _degrees_or_fail(g)
    m = build_M(g).entries
    mu = eigenvalues_sym(m)[0]
    n = g.n
    shifted = m - (mu - 1e-10 * max(1.0, abs(mu))) * np.eye(n)
    x = np.ones(n) + np.arange(n) * 1e-3
    for _ in range(8):
        try:
            x = np.linalg.solve(shifted, x)
        except np.linalg.LinAlgError:
            shifted = shifted + 1e-12 * np.eye(n)
            continue
        x /= np.linalg.norm(x)
    return x / np.sqrt(deg)


def random_walk_laplacian(g: Graph, f: Sequence[float]) -> np.ndarray:
    deg = _degrees_or_fail(g)
    f = np.asarray(f, dtype=float)
    out = np.empty(g.n)
    for v in range(g.n):
        out[v] = f[v] - sum(f[w] for w in g.neighbors(v)) / deg[v]
    return out


def verify_eigenfunction(g: Graph, f: Sequence[float], lam: float) -> float:
    """Max-norm residual of ``Delta f = lam f`` with the random-walk Laplacian."""
    f = _function(g, f)
    return float(np.max(np.abs(random_walk_laplacian(g, f) - lam * f)))


def max_dist_from_one(g: Graph) -> float:
    """``max_{i>1} |lambda_i - 1|``; always within [1/(N-1), 1]."""
    spec = spectrum_of(g)
    n = g.n
    if n < 2:
        raise DomainError("need at least two vertices")
    value = max(abs(x - 1.0) for x in spec.values[1:])
    if not 1.0 / (n - 1) - BOUND_TOL <= value <= 1.0 + BOUND_TOL:
        raise NumericError(f"max |lambda_i - 1| = {value} escapes [1/(N-1), 1]")
    return value


def degree_bound_epsilon(g: Graph) -> float:
    """``sqrt(d-1)/d`` for the minimum degree d >= 2, an upper bound on epsilon."""
    if not is_connected(g):
        raise DomainError("graph is disconnected")
    d = min(g.degrees)
    if d <= 1:
        raise DomainError(f"minimum degree {d}; the bound needs d >= 2")
    return math.sqrt(d - 1) / d


def neighborhood_laplacian(g: Graph, ell: int) -> SymMatrix:
    """``I - (I - L_sym)^ell`` by repeated multiplication."""
    if ell < 1:
        raise UsageError("ell must be >= 1")
    lap = normalized_laplacian_sym(g).entries
    step = np.eye(g.n) - lap
    power = step.copy()
    for _ in range(ell - 1):
        power = power @ step
    out = np.eye(g.n) - power
    return SymMatrix((out + out.T) / 2)


def neighborhood_gap_check(g: Graph, ell: int, tol: float = BOUND_TOL) -> tuple[float, bool]:
    """Distance from 1 to the nearest eigenvalue of the order-``ell`` neighbourhood Laplacian.

    ``holds`` requires that distance to be at most ``2**-ell`` and, for even
    ``ell``, the top eigenvalue to lie in ``[1 - 2**-ell, 1]``.
    """
    if not is_connected(g):
        raise DomainError("graph is disconnected")
    spec = eigenvalues_sym(neighborhood_laplacian(g, ell))
    bound = 0.5**ell
    min_dist, _ = min_abs_deviation(spec, 1.0)
    holds = min_dist <= bound + tol
    if ell % 2 == 0:
        top = spec[-1]
        holds = holds and 1.0 - bound - tol <= top <= 1.0 + tol
    return min_dist, holds


def symmetric_difference_margin(g: Graph, u: int, v: int) -> float | None:
    """``sum_{w in N(u) ^ N(v)} (1/deg w - 1/4)``, or None when N(u) and N(v) are disjoint.

    Every graph with epsilon >= 1/2 has margin >= 1/2 on all pairs that share a neighbour.
    """
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise UsageError(f"vertex out of range for n={g.n}")
    if not g.adj[u] & g.adj[v]:
        return None
    degs = g.degrees
    diff = g.adj[u] ^ g.adj[v]
    return sum(1.0 / degs[w] - 0.25 for w in range(g.n) if diff >> w & 1)


def deg3_neighbor_filter(g: Graph) -> bool:
    """True iff every vertex has a neighbour of degree at most 3.

    False proves epsilon <= 1/2 without an eigensolve.
    """
    degs = g.degrees
    return all(any(degs[w] <= 3 for w in g.neighbors(v)) for v in range(g.n))


def family_eigenfunctions(tag: FamilyTag) -> list[tuple[np.ndarray, float]]:
    """Explicit eigenfunctions of the petal and book graphs, in :func:`make_family` vertex order.

    Petal(m): ``f(w_i) = -f(v_i)``, ``f(x) = 0`` for 3/2; all sides 1 and apex -2
    for 3/2; ``f(v_i) = f(w_i)`` summing to zero with ``f(x) = 0`` for 1/2.
    Book(m): ``f(w_i) = +-f(v_i)``, sides summing to zero, spine zero for 1/2 and 3/2;
    sides ``v=1, w=-1`` with spine ``2, -2`` for 1/2; sides -1 with spine 2, 2 for 3/2.
    """
    m = tag.params[0] if tag.params else 0
    out: list[tuple[np.ndarray, float]] = []
    if tag.kind == "Petal":
        n = 2 * m + 1
        v = lambda i: i  # noqa: E731
        w = lambda i: m + i  # noqa: E731
        for i in range(1, m + 1):
            f = np.zeros(n)
            f[v(i)], f[w(i)] = 1.0, -1.0
            out.append((f, 1.5))
        f = np.ones(n)
        f[0] = -2.0
        out.append((f, 1.5))
        for i in range(2, m + 1):
            f = np.zeros(n)
            f[v(1)] = f[w(1)] = 1.0
            f[v(i)] = f[w(i)] = -1.0
            out.append((f, 0.5))
        return out
    if tag.kind == "Book":
        n = 2 * m + 2
        v = lambda i: 1 + i  # noqa: E731
        w = lambda i: 1 + m + i  # noqa: E731
        for i in range(2, m + 1):
            for sign, lam in ((1.0, 0.5), (-1.0, 1.5)):
                f = np.zeros(n)
                f[v(1)], f[w(1)] = 1.0, sign
                f[v(i)], f[w(i)] = -1.0, -sign
                out.append((f, lam))
        f = np.zeros(n)
        g_ = np.zeros(n)
        for i in range(1, m + 1):
            f[v(i)], f[w(i)] = 1.0, -1.0
            g_[v(i)] = g_[w(i)] = -1.0
        f[0], f[1] = 2.0, -2.0
        g_[0] = g_[1] = 2.0
        out += [(f, 0.5), (g_, 1.5)]
        return out
    raise UsageError(f"no explicit eigenfunctions for {tag}")
