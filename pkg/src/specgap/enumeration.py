"""Exhaustive verification over all connected graphs on a few vertices.

Two graph sources are supported. ``labeled`` walks every edge mask on ``n``
labelled vertices (the ground truth, n <= 8); ``isomorph_free`` produces one
graph per isomorphism class by canonical augmentation (n <= 10). The compiled
sweep in :mod:`specgap._kernels` evaluates every graph; work is split into
chunks of the mask space (or batches of representatives) and merged by
max / sum / union, so the result does not depend on scheduling.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import islice
from typing import Iterator

import numpy as np

from . import _kernels as K
from .canon import canonical_form, isomorph_free_connected
from .errors import UsageError
from .formats import to_graph6
from .graph import FamilyTag, Graph, classify_family, make_family
from .spectral import epsilon_direct

SCHEMA_VERSION = 1
LABELED_MAX_N = 8
ISOFREE_MAX_N = 10
NEIGHBOR_MAX_ELL = K.MAX_ELL

DEFAULT_TOLERANCES = {
    "half": 1e-8,  # epsilon above 1/2 + tol is a violation; within tol of 1/2 is a witness
    "near": 1e-6,  # graphs this close to 1/2 are always re-solved and classified
    "bound": 1e-9,  # degree bound and the max |lambda_i - 1| bounds
    "lemma1": 1e-8,  # |epsilon_direct - epsilon_via_M|
    "neighborhood": 1e-9,
}

FLAG_NAMES = {
    K.V_GAP: "epsilon_above_half",
    K.V_DEGREE: "degree_bound",
    K.V_PROP: "max_dist_bounds",
    K.V_LEMMA1: "lemma1_mismatch",
    K.V_NEIGHBOR: "neighborhood_bound",
    K.V_FILTER: "filter_contradiction",
    K.V_NUMERIC: "numeric_failure",
}
MAX_LISTED_VIOLATIONS = 100


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SPECGAP_THREADS", "1")))
    except ValueError:
        return 1


def edge_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertex pair of each mask bit, in graph6 column order: (0,1), (0,2), (1,2), (0,3), ..."""
    pu, pv = [], []
    for j in range(1, n):
        for i in range(j):
            pu.append(i)
            pv.append(j)
    return np.array(pu, dtype=np.int64), np.array(pv, dtype=np.int64)


def graph_from_mask(n: int, mask: int) -> Graph:
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if mask >> k & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return Graph._trusted(n, tuple(rows))


def mask_of(g: Graph) -> int:
    mask = 0
    k = 0
    for j in range(1, g.n):
        for i in range(j):
            if g.adj[i] >> j & 1:
                mask |= 1 << k
            k += 1
    return mask


def _check_n(n: int, lo: int, hi: int, what: str) -> None:
    if not isinstance(n, (int, np.integer)) or not lo <= n <= hi:
        raise UsageError(f"{what} supports {lo} <= n <= {hi}, got {n}")


def _chunks(n: int) -> list[tuple[int, int]]:
    bits = n * (n - 1) // 2
    k = min(bits, 8)
    width = 1 << (bits - k)
    return [(c * width, (c + 1) * width) for c in range(1 << k)]


def labeled_connected_stream(n: int) -> Iterator[Graph]:
    """Every connected labelled graph on ``n`` vertices, by ascending edge mask."""
    _check_n(n, 3, LABELED_MAX_N, "labeled enumeration")
    pu, pv = edge_pairs(n)
    for lo, hi in _chunks(n):
        for mask in K.connected_masks(n, lo, hi, pu, pv):
            yield graph_from_mask(n, int(mask))


def isomorph_free_stream(n: int) -> Iterator[Graph]:
    """One connected graph per isomorphism class on ``n`` vertices."""
    _check_n(n, 3, ISOFREE_MAX_N, "isomorph-free enumeration")
    return isomorph_free_connected(n)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    n: int
    mode: str
    counters: np.ndarray
    floats: np.ndarray
    dmax: np.ndarray
    dcount: np.ndarray
    nb_excess: np.ndarray
    nb_eq: np.ndarray
    nb_top_lo: np.ndarray
    nb_top_hi: np.ndarray
    candidates: list[Graph]
    violations: list[tuple[Graph, int]]
    graphs_seen: int
    wall_time: float

    @property
    def connected(self) -> int:
        return int(self.counters[K.C_CONNECTED])


def _merge(parts, decode):
    counters = np.sum([p[0] for p in parts], axis=0)
    floats = np.max([p[1] for p in parts], axis=0)
    dmax = np.max([p[2] for p in parts], axis=0)
    dcount = np.sum([p[3] for p in parts], axis=0)
    nb_excess = np.max([p[4] for p in parts], axis=0)
    nb_eq = np.sum([p[5] for p in parts], axis=0)
    nb_top_lo = np.min([p[6] for p in parts], axis=0)
    nb_top_hi = np.max([p[7] for p in parts], axis=0)
    cands = [decode(part_i, int(key)) for part_i, p in enumerate(parts) for key, _ in p[8]]
    viols = [(decode(part_i, int(key)), int(code)) for part_i, p in enumerate(parts) for key, code in p[9]]
    return counters, floats, dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi, cands, viols


def _run(jobs, threads):
    if threads <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: job(), jobs))


@lru_cache(maxsize=32)
def sweep(
    n: int,
    mode: str = "labeled",
    prune: bool = False,
    lemma1: bool = False,
    ell_max: int = 0,
    threads: int = 1,
    near: float = 0.5 - DEFAULT_TOLERANCES["near"],
    tol_half: float = DEFAULT_TOLERANCES["half"],
    tol_bound: float = DEFAULT_TOLERANCES["bound"],
    tol_lemma1: float = DEFAULT_TOLERANCES["lemma1"],
    tol_neighborhood: float = DEFAULT_TOLERANCES["neighborhood"],
) -> SweepResult:
    """Evaluate every connected graph on ``n`` vertices once.

    Graphs with epsilon >= ``near`` come back as candidates. Results are
    cached per argument tuple, so the theorem checks below can share one pass.
    """
    if mode not in ("labeled", "isomorph_free"):
        raise UsageError(f"unknown enumeration mode {mode!r}")
    if not 0 <= ell_max <= NEIGHBOR_MAX_ELL:
        raise UsageError(f"ell_max must be in 0..{NEIGHBOR_MAX_ELL}")
    if threads < 1:
        raise UsageError("threads must be >= 1")
    opts = np.array([int(prune), int(lemma1), int(ell_max)], dtype=np.int64)
    tols = np.array([tol_half, tol_bound, tol_lemma1, tol_neighborhood], dtype=np.float64)
    start = time.perf_counter()
    if mode == "labeled":
        _check_n(n, 3, LABELED_MAX_N, "labeled enumeration")
        pu, pv = edge_pairs(n)
        chunks = _chunks(n)
        jobs = [
            (lambda lo=lo, hi=hi: K.scan_masks(n, lo, hi, pu, pv, opts, tols, float(near)))
            for lo, hi in chunks
        ]
        parts = _run(jobs, threads)
        merged = _merge(parts, lambda _i, mask: graph_from_mask(n, mask))
        seen = 1 << (n * (n - 1) // 2)
    else:
        _check_n(n, 3, ISOFREE_MAX_N, "isomorph-free enumeration")
        batches: list[list[Graph]] = []
        stream = isomorph_free_connected(n)
        while True:
            batch = list(islice(stream, 20000))
            if not batch:
                break
            batches.append(batch)

        def job(batch):
            rows = np.array([g.adj for g in batch], dtype=np.int64).reshape(len(batch), n)
            return K.scan_rows(rows, n, opts, tols, float(near))

        parts = _run([lambda b=b: job(b) for b in batches], threads)
        merged = _merge(parts, lambda i, idx: batches[i][idx])
        seen = sum(len(b) for b in batches)
    return SweepResult(n, mode, *merged, graphs_seen=seen, wall_time=time.perf_counter() - start)


def _shared_sweep(n, mode, threads, prune=False, lemma1=False, ell_max=0, **tols) -> SweepResult:
    """Call :func:`sweep` with a normalized argument tuple so checks that need
    the same pass hit the cache."""
    t = {
        "near": 0.5 - DEFAULT_TOLERANCES["near"],
        "tol_half": DEFAULT_TOLERANCES["half"],
        "tol_bound": DEFAULT_TOLERANCES["bound"],
        "tol_lemma1": DEFAULT_TOLERANCES["lemma1"],
        "tol_neighborhood": DEFAULT_TOLERANCES["neighborhood"],
    }
    t.update(tols)
    return sweep(n, mode, prune, lemma1, ell_max, threads, t["near"], t["tol_half"],
                 t["tol_bound"], t["tol_lemma1"], t["tol_neighborhood"])


# ---------------------------------------------------------------------------
# reports


def _flag_names(code: int) -> list[str]:
    return [name for bit, name in FLAG_NAMES.items() if code & bit]


def _violation_entries(violations, mask: int) -> list[dict]:
    out = []
    for g, code in violations:
        if code & mask:
            out.append({"graph6": to_graph6(g), "checks": _flag_names(code & mask)})
    return out


@dataclass
class EnumReport:
    n: int
    mode: str
    labeled_total: int
    connected_count: int
    isomorphism_classes: int | None
    max_epsilon: float
    extremal_witnesses: list[dict]
    violations: list[dict]
    pruned_by_filter: int
    wall_time: float
    prune: bool = False
    near_boundary: int = 0
    violation_count: int = 0
    tolerances: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def witness_tags(self) -> list[FamilyTag]:
        return [FamilyTag.parse(w["family"]) for w in self.extremal_witnesses]

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("wall_time")
        d["report"] = "gap"
        d["schema_version"] = SCHEMA_VERSION
        d["verified_range"] = f"connected graphs on exactly n={self.n} vertices"
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"


def verify_gap_theorem(
    n: int,
    mode: str = "labeled",
    prune: bool = False,
    threads: int = 1,
    tol_half: float = DEFAULT_TOLERANCES["half"],
    tol_near: float = DEFAULT_TOLERANCES["near"],
) -> EnumReport:
    """Check epsilon <= 1/2 on every connected graph and that only petal/book graphs reach it.

    Every graph with epsilon >= 1/2 - tol_near is re-solved and classified.
    With ``prune`` the degree-3 neighbour filter runs too; a graph it rejects
    is counted and must not exceed 1/2, but it is still eigensolved.
    """
    res = _shared_sweep(n, mode, threads, prune, near=0.5 - tol_near, tol_half=tol_half)
    witnesses: dict[FamilyTag, dict] = {}
    violations = _violation_entries(res.violations, K.V_GAP | K.V_FILTER | K.V_NUMERIC)
    odd_classes: dict[bytes, dict] = {}
    near_boundary = 0
    for g in res.candidates:
        rep = epsilon_direct(g, tol_half=tol_half)
        if abs(rep.epsilon - 0.5) <= tol_near:
            near_boundary += 1
        if rep.epsilon < 0.5 - tol_half:
            continue
        tag = rep.family
        if tag.is_extremal:
            entry = witnesses.setdefault(
                tag, {"family": str(tag), "graph6": to_graph6(make_family(tag)), "count": 0, "epsilon": rep.epsilon}
            )
            entry["count"] += 1
            entry["epsilon"] = max(entry["epsilon"], rep.epsilon)
        else:
            key = canonical_form(g)
            if key not in odd_classes:
                odd_classes[key] = {"graph6": to_graph6(g), "checks": ["extremal_not_petal_or_book"]}
    violations += odd_classes.values()
    count = len(violations)
    return EnumReport(
        n=n,
        mode=mode,
        labeled_total=1 << (n * (n - 1) // 2),
        connected_count=res.connected,
        isomorphism_classes=res.connected if mode == "isomorph_free" else None,
        max_epsilon=float(res.floats[K.F_MAX_EPS]),
        extremal_witnesses=[witnesses[t] for t in sorted(witnesses)],
        violations=violations[:MAX_LISTED_VIOLATIONS],
        pruned_by_filter=int(res.counters[K.C_PRUNED]),
        wall_time=res.wall_time,
        prune=prune,
        near_boundary=near_boundary,
        violation_count=count,
        tolerances={"half": tol_half, "near": tol_near},
    )


@dataclass
class CheckReport:
    """Generic summary for the degree-bound, neighbourhood, M-matrix and max-distance checks."""

    report: str
    n: int
    mode: str
    connected_count: int
    details: dict
    violations: list[dict]
    violation_count: int
    wall_time: float
    tolerances: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("wall_time")
        d["schema_version"] = SCHEMA_VERSION
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"


def verify_degree_bound(
    n: int, mode: str = "labeled", threads: int = 1, tol: float = DEFAULT_TOLERANCES["bound"]
) -> CheckReport:
    """epsilon <= sqrt(d-1)/d for minimum degree d >= 2; lists the largest epsilon per d."""
    res = _shared_sweep(n, mode, threads, tol_bound=tol)
    per_d = {}
    for d in range(2, n):
        if res.dcount[d]:
            per_d[str(d)] = {
                "graphs": int(res.dcount[d]),
                "max_epsilon": float(res.dmax[d]),
                "bound": math.sqrt(d - 1) / d,
            }
    viols = _violation_entries(res.violations, K.V_DEGREE | K.V_NUMERIC)
    count = int(res.counters[K.C_DEGREE_VIOL] + res.counters[K.C_QL_FAIL])
    return CheckReport(
        "degree-bound", n, mode, res.connected, {"by_min_degree": per_d},
        viols[:MAX_LISTED_VIOLATIONS], count, res.wall_time, {"bound": tol},
    )


def verify_max_dist(
    n: int, mode: str = "labeled", threads: int = 1, tol: float = DEFAULT_TOLERANCES["bound"]
) -> CheckReport:
    """1/(N-1) <= max_{i>1} |lambda_i - 1| <= 1, equal to the lower end exactly on
    complete graphs and to the upper end exactly on bipartite ones."""
    res = _shared_sweep(n, mode, threads, tol_bound=tol)
    c = res.counters
    details = {
        "lower_bound": 1.0 / (n - 1),
        "lower_equality": int(c[K.C_PROP_LOW_EQ]),
        "complete_graphs": int(c[K.C_COMPLETE]),
        "upper_equality": int(c[K.C_PROP_HIGH_EQ]),
        "bipartite_graphs": int(c[K.C_BIPARTITE]),
        "max_value": float(res.floats[K.F_MAXDIST_MAX]),
    }
    viols = _violation_entries(res.violations, K.V_PROP | K.V_NUMERIC)
    count = int(c[K.C_PROP_VIOL] + c[K.C_QL_FAIL])
    return CheckReport("max-dist", n, mode, res.connected, details,
                       viols[:MAX_LISTED_VIOLATIONS], count, res.wall_time, {"bound": tol})


def verify_lemma1(
    n: int, mode: str = "labeled", threads: int = 1, tol: float = DEFAULT_TOLERANCES["lemma1"]
) -> CheckReport:
    """Compare epsilon from the spectrum with sqrt of the smallest eigenvalue of M."""
    res = _shared_sweep(n, mode, threads, lemma1=True, tol_lemma1=tol)
    details = {
        "max_deviation": float(res.floats[K.F_LEMMA1_DEV]),
        "failures": int(res.counters[K.C_LEMMA1_FAIL]),
    }
    viols = _violation_entries(res.violations, K.V_LEMMA1 | K.V_NUMERIC)
    count = int(res.counters[K.C_LEMMA1_FAIL] + res.counters[K.C_QL_FAIL])
    return CheckReport("lemma1", n, mode, res.connected, details,
                       viols[:MAX_LISTED_VIOLATIONS], count, res.wall_time, {"lemma1": tol})


def verify_neighborhood_theorem(
    n: int, ell_max: int, mode: str = "labeled", threads: int = 1,
    tol: float = DEFAULT_TOLERANCES["neighborhood"],
) -> CheckReport:
    """For each ell <= ell_max: some eigenvalue of I - (I - L)^ell within 2^-ell of 1,
    and for even ell the top eigenvalue in [1 - 2^-ell, 1]."""
    _check_n(n, 3, 7, "neighborhood verification")
    if not 1 <= ell_max <= NEIGHBOR_MAX_ELL:
        raise UsageError(f"ell_max must be in 1..{NEIGHBOR_MAX_ELL}")
    res = _shared_sweep(n, mode, threads, ell_max=ell_max, tol_neighborhood=tol)
    per_ell = {}
    for ell in range(1, ell_max + 1):
        entry = {
            "bound": 0.5**ell,
            "max_excess": float(res.nb_excess[ell]),
            "equality_count": int(res.nb_eq[ell]),
        }
        if ell % 2 == 0:
            entry["min_top_minus_lower"] = float(res.nb_top_lo[ell])
            entry["max_top"] = float(res.nb_top_hi[ell])
        per_ell[str(ell)] = entry
    viols = _violation_entries(res.violations, K.V_NEIGHBOR | K.V_NUMERIC)
    count = int(res.counters[K.C_NEIGHBOR_VIOL] + res.counters[K.C_QL_FAIL])
    return CheckReport("neighborhood", n, mode, res.connected, {"by_ell": per_ell},
                       viols[:MAX_LISTED_VIOLATIONS], count, res.wall_time, {"neighborhood": tol})


def threshold_rows(n: int, threshold: float, mode: str = "labeled", threads: int = 1) -> list[dict]:
    """CSV rows (graph6, n, d_min, epsilon, family) for graphs with epsilon >= threshold."""
    res = _shared_sweep(n, mode, threads, near=threshold)
    rows = []
    for g in res.candidates:
        rep = epsilon_direct(g)
        if rep.epsilon >= threshold:
            rows.append({
                "graph6": to_graph6(g),
                "n": g.n,
                "d_min": min(g.degrees),
                "epsilon": rep.epsilon,
                "family": str(classify_family(g)),
            })
    return rows
