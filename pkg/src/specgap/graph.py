"""Simple undirected graphs stored as adjacency bitrows, plus the named families.

Row ``v`` of a :class:`Graph` is an integer whose bit ``w`` is set iff ``v ~ w``.
Graphs are immutable; every operation returns a new value.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import GraphError

MAX_VERTICES = 64


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_VERTICES:
            raise GraphError(f"vertex count must be in 1..{MAX_VERTICES}, got {self.n}")
        if len(self.adj) != self.n:
            raise GraphError("need exactly one bitrow per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise GraphError(f"row {v} references a vertex >= n")
            if row >> v & 1:
                raise GraphError(f"self-loop at vertex {v}")
            w = row
            while w:
                low = w & -w
                u = low.bit_length() - 1
                if not self.adj[u] >> v & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")
                w ^= low

    @classmethod
    def _trusted(cls, n: int, adj: tuple[int, ...]) -> Graph:
        # skips validation; for rows produced by the enumerators
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "adj", adj)
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.adj]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if self.adj[u] >> v & 1]

    def neighbors(self, v: int) -> list[int]:
        _check_vertex(self, v)
        return [w for w in range(self.n) if self.adj[v] >> w & 1]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling must be a permutation of range(n)")
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range for n={g.n}")


def degree(g: Graph, v: int) -> int:
    _check_vertex(g, v)
    return g.adj[v].bit_count()


def is_connected(g: Graph) -> bool:
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        w = frontier
        while w:
            low = w & -w
            reach |= g.adj[low.bit_length() - 1]
            w ^= low
        frontier = reach & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if color[w] < 0:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return False
    return True


def components(g: Graph) -> list[list[int]]:
    left = (1 << g.n) - 1
    out = []
    while left:
        start = left & -left
        seen = frontier = start
        while frontier:
            reach = 0
            w = frontier
            while w:
                low = w & -w
                reach |= g.adj[low.bit_length() - 1]
                w ^= low
            frontier = reach & ~seen
            seen |= frontier
        out.append([v for v in range(g.n) if seen >> v & 1])
        left &= ~seen
    return out


# ---------------------------------------------------------------------------
# Named families

_KINDS = {
    "petal": "Petal",
    "book": "Book",
    "path": "Path",
    "cycle": "Cycle",
    "complete": "Complete",
    "complete-bipartite": "CompleteBipartite",
    "completebipartite": "CompleteBipartite",
    "kbip": "CompleteBipartite",
    "other": "Other",
}
_ARITY = {"Petal": 1, "Book": 1, "Path": 1, "Cycle": 1, "Complete": 1, "CompleteBipartite": 2, "Other": 0}


@dataclass(frozen=True, order=True)
class FamilyTag:
    kind: str
    params: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _ARITY:
            raise GraphError(f"unknown family {self.kind!r}")
        if len(self.params) != _ARITY[self.kind]:
            raise GraphError(f"{self.kind} takes {_ARITY[self.kind]} parameter(s)")

    @property
    def is_extremal(self) -> bool:
        return self.kind in ("Petal", "Book")

    @classmethod
    def parse(cls, text: str) -> FamilyTag:
        """Parse ``petal:3``, ``complete-bipartite:2,3`` or ``Book(2)``."""
        text = text.strip()
        m = re.fullmatch(r"([A-Za-z-]+)\s*(?:[:(]\s*([\d,\s]*)\)?)?", text)
        if not m:
            raise GraphError(f"cannot parse family spec {text!r}")
        name = m.group(1)
        kind = _KINDS.get(name.lower(), name if name in _ARITY else None)
        if kind is None:
            raise GraphError(f"unknown family {name!r}")
        raw = m.group(2) or ""
        params = tuple(int(p) for p in raw.replace(" ", "").split(",") if p)
        return cls(kind, params)

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(map(str, self.params))})"


def Petal(m: int) -> FamilyTag:
    return FamilyTag("Petal", (m,))


def Book(m: int) -> FamilyTag:
    return FamilyTag("Book", (m,))


OTHER = FamilyTag("Other")


def make_family(tag: FamilyTag) -> Graph:
    """Build a family member with its canonical vertex order.

    Petal(m): apex ``x`` = 0, ``v_i`` = i, ``w_i`` = m + i.
    Book(m): spine ``x`` = 0, ``y`` = 1, ``v_i`` = 1 + i, ``w_i`` = 1 + m + i.
    """
    kind, p = tag.kind, tag.params
    if kind == "Other":
        raise GraphError("Other is not a constructible family")
    if any(k < 1 for k in p):
        raise GraphError(f"{tag}: parameters must be >= 1")
    if kind == "Petal":
        m = p[0]
        edges = [(0, i) for i in range(1, 2 * m + 1)] + [(i, m + i) for i in range(1, m + 1)]
        return Graph.from_edges(2 * m + 1, edges)
    if kind == "Book":
        m = p[0]
        edges = []
        for i in range(1, m + 1):
            v, w = 1 + i, 1 + m + i
            edges += [(0, v), (1, w), (v, w)]
        return Graph.from_edges(2 * m + 2, edges)
    if kind == "Path":
        n = p[0]
        return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))
    if kind == "Cycle":
        n = p[0]
        if n < 3:
            raise GraphError("Cycle needs N >= 3")
        return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))
    if kind == "Complete":
        n = p[0]
        return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))
    a, b = p
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def petal(m: int) -> Graph:
    return make_family(Petal(m))


def book(m: int) -> Graph:
    return make_family(Book(m))


def path(n: int) -> Graph:
    return make_family(FamilyTag("Path", (n,)))


def cycle(n: int) -> Graph:
    return make_family(FamilyTag("Cycle", (n,)))


def complete(n: int) -> Graph:
    return make_family(FamilyTag("Complete", (n,)))


def complete_bipartite(a: int, b: int) -> Graph:
    return make_family(FamilyTag("CompleteBipartite", (a, b)))


# ---------------------------------------------------------------------------
# Recognizers. Structural checks only; these run inside enumeration loops.


def _is_cycle(g: Graph) -> bool:
    return g.n >= 3 and all(d == 2 for d in g.degrees) and is_connected(g)


def _is_path(g: Graph) -> bool:
    if g.n == 1:
        return True
    degs = g.degrees
    return g.num_edges == g.n - 1 and max(degs) <= 2 and degs.count(1) == 2 and is_connected(g)


def _petal_size(g: Graph) -> int | None:
    n = g.n
    if n < 3 or n % 2 == 0:
        return None
    m = (n - 1) // 2
    degs = g.degrees
    if g.num_edges != 3 * m:
        return None
    full = (1 << n) - 1
    apex = next((v for v in range(n) if g.adj[v] == full & ~(1 << v)), None)
    if apex is None:
        return None
    # remaining vertices must pair off into disjoint edges
    for v in range(n):
        if v == apex:
            continue
        if degs[v] != 2:
            return None
        rest = g.adj[v] & ~(1 << apex)
        if rest.bit_count() != 1:
            return None
    return m


def _book_size(g: Graph) -> int | None:
    n = g.n
    if n < 4 or n % 2 == 1:
        return None
    m = (n - 2) // 2
    if g.num_edges != 3 * m or not is_connected(g):
        return None
    degs = g.degrees
    if m == 1:
        return 1 if _is_path(g) else None
    if m == 2:
        return 2 if _is_cycle(g) else None
    spine = [v for v in range(n) if degs[v] == m]
    if len(spine) != 2 or sorted(degs) != [2] * (2 * m) + [m, m]:
        return None
    x, y = spine
    if g.has_edge(x, y):
        return None
    for v in g.neighbors(x):
        others = [w for w in g.neighbors(v) if w != x]
        if len(others) != 1:
            return None
        w = others[0]
        if not g.has_edge(w, y) or degs[w] != 2:
            return None
    return m


def classify_family(g: Graph) -> FamilyTag:
    """Return Petal(m) or Book(m) when ``g`` is one of the extremal graphs, else Other.

    C3, P4 and C6 resolve to Petal(1), Book(1) and Book(2).
    """
    m = _petal_size(g)
    if m is not None:
        return Petal(m)
    m = _book_size(g)
    if m is not None:
        return Book(m)
    return OTHER


def recognize_family(g: Graph) -> FamilyTag:
    """Like :func:`classify_family` but also names paths, cycles, complete and complete bipartite graphs.

    Overlaps are resolved in the order Petal, Book, Complete, Cycle, Path,
    CompleteBipartite, so K_{2,2} reports Cycle(4) and K_{1,2} reports Path(3).
    """
    tag = classify_family(g)
    if tag.is_extremal:
        return tag
    n = g.n
    if g.num_edges == n * (n - 1) // 2:
        return FamilyTag("Complete", (n,))
    if _is_cycle(g):
        return FamilyTag("Cycle", (n,))
    if _is_path(g):
        return FamilyTag("Path", (n,))
    sides = _complete_bipartite_sides(g)
    if sides is not None:
        return FamilyTag("CompleteBipartite", sides)
    return OTHER


def _complete_bipartite_sides(g: Graph) -> tuple[int, int] | None:
    if g.n < 2 or not is_connected(g):
        return None
    a = g.adj[0].bit_count()
    b = g.n - a
    if a < 1 or b < 1 or g.num_edges != a * b:
        return None
    side_b = (1 << g.n) - 1 & ~g.adj[0]
    side_a = g.adj[0]
    for v in range(g.n):
        want = side_a if side_b >> v & 1 else side_b
        if g.adj[v] != want:
            return None
    return (min(a, b), max(a, b))


def iter_vertices(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
