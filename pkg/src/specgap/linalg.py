"""Dense real symmetric eigenvalues with tolerance-based multiplicity grouping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericError

CLUSTER_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Symmetric matrix; the constructor symmetrizes nothing and rejects asymmetry."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"need a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NumericError("matrix has non-finite entries")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __getitem__(self, idx):
        return self.entries[idx]


def cluster(values, tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group sorted values greedily; a value joins the open group iff it is within
    ``tol`` of that group's first element. Each group reports its first value."""
    groups: list[tuple[float, int]] = []
    for x in values:
        if groups and x - groups[-1][0] <= tol:
            head, count = groups[-1]
            groups[-1] = (head, count + 1)
        else:
            groups.append((float(x), 1))
    return groups


@dataclass(frozen=True)
class Spectrum:
    values: tuple[float, ...]
    tol: float = CLUSTER_TOL
    groups: tuple[tuple[float, int], ...] = field(init=False)

    def __post_init__(self) -> None:
        vals = tuple(float(x) for x in self.values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("spectrum values must be ascending")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "groups", tuple(cluster(vals, self.tol)))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def regroup(self, tol: float) -> Spectrum:
        return Spectrum(self.values, tol)


def eigenvalues_sym(m: SymMatrix | np.ndarray, tol: float = CLUSTER_TOL) -> Spectrum:
    """All eigenvalues, ascending: Householder tridiagonalization then implicit-shift QL."""
    if not isinstance(m, SymMatrix):
        m = SymMatrix(np.asarray(m, dtype=float))
    if m.n == 0:
        return Spectrum((), tol)
    values, ok = _kernels.eigvalsh(np.ascontiguousarray(m.entries))
    if not ok:
        raise NumericError("QL iteration did not converge")
    return Spectrum(tuple(values), tol)


def min_abs_deviation(s: Spectrum, center: float) -> tuple[float, int]:
    """Smallest ``|center - lambda_i|`` and its index (first index on ties)."""
    if len(s) == 0:
        raise ValueError("empty spectrum")
    best, best_i = abs(center - s[0]), 0
    for i, x in enumerate(s.values[1:], start=1):
        dev = abs(center - x)
        if dev < best:
            best, best_i = dev, i
    return best, best_i
