"""Text formats: graph6 and the plain edge list (``n`` then one ``u v`` pair per line)."""

from __future__ import annotations

from .errors import GraphError, ParseError
from .graph import Graph

G6_HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return chr(126) + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    raise GraphError("graph too large for graph6")


def to_graph6(g: Graph) -> str:
    bits = [g.adj[i] >> j & 1 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = "".join(
        chr(63 + int("".join(map(str, bits[k : k + 6])), 2)) for k in range(0, len(bits), 6)
    )
    return _encode_n(g.n) + body


def from_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(G6_HEADER):
        s = s[len(G6_HEADER) :]
    if not s:
        raise ParseError("empty graph6 string")
    data = [ord(c) - 63 for c in s]
    if any(not 0 <= x <= 63 for x in data):
        raise ParseError("graph6 characters must lie in '?'..'~'")
    if data[0] == 63:
        if len(data) < 4 or data[1] == 63:
            raise ParseError("unsupported graph6 size prefix")
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        data = data[4:]
    else:
        n = data[0]
        data = data[1:]
    if n == 0:
        raise ParseError("graph6 with zero vertices")
    need = n * (n - 1) // 2
    if len(data) != (need + 5) // 6:
        raise ParseError(f"graph6 body has {len(data)} bytes, expected {(need + 5) // 6} for n={n}")
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if data[k // 6] >> (5 - k % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    if any(data[k // 6] >> (5 - k % 6) & 1 for k in range(need, len(data) * 6)):
        raise ParseError("graph6 padding bits must be zero")
    try:
        return Graph(n, tuple(rows))
    except GraphError as exc:
        raise ParseError(str(exc)) from exc


def to_edge_list(g: Graph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1 or not fields[0].isdigit():
                raise ParseError(f"expected vertex count, got {line!r}", lineno)
            n = int(fields[0])
            if not 1 <= n <= 64:
                raise ParseError(f"vertex count {n} outside 1..64", lineno)
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"non-integer vertex in {line!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex index out of range 0..{n - 1}", lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        edges.append((u, v))
    if n is None:
        raise ParseError("empty edge list")
    return Graph.from_edges(n, edges)


def parse_graph(source: str) -> Graph:
    """Parse either an edge list or a single graph6 line.

    Edge lists start with a bare integer, which can never be valid graph6.
    """
    lines = [ln.strip() for ln in source.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty input")
    if lines[0].split()[0].isdigit():
        return from_edge_list(source)
    if len(lines) != 1:
        raise ParseError("expected a single graph6 line", 2)
    return from_graph6(lines[0])
