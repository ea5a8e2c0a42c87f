"""Canonical forms and isomorph-free generation of connected graphs.

The canonical form is found by individualization-refinement: vertices are
first split by degree, partitions are refined to equitable ones, and the
search branches on the first non-singleton cell. The key of a graph is the
smallest upper-triangle adjacency string over all leaves of that search.
Automorphisms found when a leaf reproduces the first leaf prune the tree.

Isomorph-free generation grows connected graphs one vertex at a time and keeps
a child only when the new vertex lies in the orbit of the child's canonical
deletion vertex (canonical augmentation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph import Graph

_Cells = list[list[int]]


def _mask(cell: Sequence[int]) -> int:
    m = 0
    for v in cell:
        m |= 1 << v
    return m


def refine(adj: Sequence[int], cells: _Cells) -> _Cells:
    """Coarsest equitable refinement of an ordered partition.

    Cells split by the number of neighbours each vertex has in every cell;
    sub-cells are ordered by that count vector, which keeps the result
    independent of vertex names.
    """
    while True:
        masks = [_mask(c) for c in cells]
        out: _Cells = []
        split = False
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            buckets: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                sig = tuple((adj[v] & m).bit_count() for m in masks)
                buckets.setdefault(sig, []).append(v)
            if len(buckets) > 1:
                split = True
                out.extend(buckets[s] for s in sorted(buckets))
            else:
                out.append(cell)
        cells = out
        if not split:
            return cells


def _code(adj: Sequence[int], order: Sequence[int]) -> int:
    """Upper-triangle adjacency bits of the relabelled graph, column by column (graph6 order)."""
    pos = order
    code = 0
    n = len(order)
    for j in range(1, n):
        row = adj[pos[j]]
        for i in range(j):
            code = (code << 1) | (row >> pos[i] & 1)
    return code


@dataclass
class Labeling:
    code: int
    order: list[int]
    generators: list[list[int]]

    def orbits(self, n: int) -> list[int]:
        """Orbit representative (smallest member) of every vertex under the found automorphisms."""
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gamma in self.generators:
            for v in range(n):
                a, b = find(v), find(gamma[v])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return [find(v) for v in range(n)]


class _Search:
    def __init__(self, adj: Sequence[int], n: int) -> None:
        self.adj = adj
        self.n = n
        self.first_order: list[int] | None = None
        self.first_code = -1
        self.best_code = -1
        self.best_order: list[int] = []
        self.gens: list[list[int]] = []

    def run(self, cells: _Cells) -> Labeling:
        self._descend(cells, [])
        return Labeling(self.best_code, self.best_order, self.gens)

    def _stabilizer_orbit_rep(self, prefix: list[int], v: int, explored: list[int]) -> bool:
        gens = [g for g in self.gens if all(g[p] == p for p in prefix)]
        if not gens:
            return False
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for g in gens:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return any(e in seen for e in explored)

    def _descend(self, cells: _Cells, prefix: list[int]) -> int | None:
        cells = refine(self.adj, cells)
        target_i = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target_i is None:
            return self._leaf([c[0] for c in cells], prefix)
        target = cells[target_i]
        explored: list[int] = []
        depth = len(prefix)
        for v in sorted(target):
            if explored and self._stabilizer_orbit_rep(prefix, v, explored):
                continue
            explored.append(v)
            rest = [u for u in target if u != v]
            child = cells[:target_i] + [[v], rest] + cells[target_i + 1 :]
            jump = self._descend(child, prefix + [v])
            if jump is not None and jump < depth:
                return jump
        return None

    def _leaf(self, order: list[int], prefix: list[int]) -> int | None:
        code = _code(self.adj, order)
        if self.first_order is None:
            self.first_order = order
            self.first_code = code
            self.first_prefix = list(prefix)
            self.best_code, self.best_order = code, order
            return None
        if code == self.first_code:
            gamma = [0] * self.n
            for a, b in zip(self.first_order, order):
                gamma[a] = b
            self.gens.append(gamma)
            common = 0
            for a, b in zip(self.first_prefix, prefix):
                if a != b:
                    break
                common += 1
            return common
        if code < self.best_code:
            self.best_code, self.best_order = code, order
        return None


def degree_partition(g: Graph) -> _Cells:
    by_deg: dict[int, list[int]] = {}
    for v, d in enumerate(g.degrees):
        by_deg.setdefault(d, []).append(v)
    return [by_deg[d] for d in sorted(by_deg)]


def canonical_labeling(g: Graph, cells: _Cells | None = None) -> Labeling:
    if cells is None:
        cells = degree_partition(g)
    return _Search(g.adj, g.n).run([list(c) for c in cells])


def canonical_form(g: Graph) -> bytes:
    """Relabeling-invariant key; equal keys iff isomorphic graphs."""
    lab = canonical_labeling(g)
    nbytes = (g.n * (g.n - 1) // 2 + 7) // 8
    return bytes([g.n]) + lab.code.to_bytes(nbytes, "big")


def canonical_graph(g: Graph) -> Graph:
    lab = canonical_labeling(g)
    inverse = [0] * g.n
    for new, old in enumerate(lab.order):
        inverse[old] = new
    return g.relabel(inverse)


def automorphism_count(g: Graph) -> int:
    """Order of the automorphism group, by exhaustive search of degree-respecting bijections."""
    cells = degree_partition(g)
    target = [v for c in cells for v in c]
    slots = {v: i for i, c in enumerate(cells) for v in c}
    count = 0
    image = [-1] * g.n
    used = [False] * g.n

    def extend(k: int) -> None:
        nonlocal count
        if k == g.n:
            count += 1
            return
        v = target[k]
        for w in cells[slots[v]]:
            if used[w]:
                continue
            ok = all((g.adj[v] >> u & 1) == (g.adj[w] >> image[u] & 1) for u in target[:k])
            if ok:
                image[v] = w
                used[w] = True
                extend(k + 1)
                used[w] = False
        image[v] = -1

    extend(0)
    return count


# ---------------------------------------------------------------------------
# canonical augmentation


def _connected_without(adj: Sequence[int], n: int, drop: int) -> bool:
    full = ((1 << n) - 1) & ~(1 << drop)
    if not full:
        return True
    start = full & -full
    seen = frontier = start
    while frontier:
        reach = 0
        w = frontier
        while w:
            low = w & -w
            reach |= adj[low.bit_length() - 1]
            w ^= low
        frontier = reach & full & ~seen
        seen |= frontier
    return seen == full


def _vertex_invariant(adj: Sequence[int], degs: Sequence[int], v: int) -> tuple:
    nb = sorted(degs[w] for w in range(len(degs)) if adj[v] >> w & 1)
    return (degs[v], tuple(nb))


def _accept_child(adj: list[int], n: int, new: int) -> tuple[bool, Labeling | None]:
    """Is ``new`` in the orbit of the canonical deletion vertex of this graph?

    The deletion vertex is the non-cut vertex with the smallest invariant,
    ties broken by position in the canonical order.
    """
    degs = [r.bit_count() for r in adj]
    inv_new = _vertex_invariant(adj, degs, new)
    best = None
    ties = []
    for v in range(n):
        inv = _vertex_invariant(adj, degs, v)
        # removing ``new`` leaves the connected parent, so it is never a cut vertex
        if best is not None and inv > best:
            continue
        if v != new and not _connected_without(adj, n, v):
            continue
        if best is None or inv < best:
            best, ties = inv, [v]
        else:
            ties.append(v)
    if inv_new != best:
        return False, None
    g = Graph._trusted(n, tuple(adj))
    lab = canonical_labeling(g)
    if len(ties) == 1:
        return True, lab
    position = {v: i for i, v in enumerate(lab.order)}
    chosen = min(ties, key=position.__getitem__)
    if chosen == new:
        return True, lab
    orbit = lab.orbits(n)
    return orbit[chosen] == orbit[new], lab


def isomorph_free_connected(n: int) -> Iterator[Graph]:
    """One representative per isomorphism class of connected graphs on ``n`` vertices."""
    if n < 1:
        return
    if n == 1:
        yield Graph._trusted(1, (0,))
        return
    for parent in isomorph_free_connected(n - 1):
        yield from _children(parent)


def _children(parent: Graph) -> Iterator[Graph]:
    n = parent.n + 1
    new = n - 1
    seen: set[int] = set()
    for subset in range(1, 1 << parent.n):
        adj = list(parent.adj) + [subset]
        s = subset
        while s:
            low = s & -s
            adj[low.bit_length() - 1] |= 1 << new
            s ^= low
        ok, lab = _accept_child(adj, n, new)
        if not ok:
            continue
        if lab.code in seen:
            continue
        seen.add(lab.code)
        yield Graph._trusted(n, tuple(adj))
