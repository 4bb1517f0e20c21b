"""Finite simple connected regular graphs: construction, validation, file I/O.

Vertices are 0-indexed integers and neighbor lists are stored sorted, so two
graphs with the same edge set compare (and hash) equal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    DegreeTooSmall,
    DuplicateEdge,
    GraphSyntaxError,
    NotConnected,
    NotRegular,
    SelfLoop,
    UnknownName,
    VertexOutOfRange,
)

NAMED_GRAPHS = ("complete", "complete_bipartite", "petersen", "circular_ladder")


@dataclass(frozen=True)
class Graph:
    """A validated (q+1)-regular graph. Build through :func:`build_graph`."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    degree: int

    @property
    def q(self) -> int:
        return self.degree - 1

    @property
    def num_edges(self) -> int:
        return self.n * self.degree // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, nbrs in enumerate(self.adjacency):
            a[u, list(nbrs)] = 1
        return a


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate an undirected edge list and return a :class:`Graph`.

    Checks run in a fixed order: endpoint range, self-loops, duplicate edges,
    connectivity, regularity, then the degree floor d >= 3.
    """
    if n <= 0:
        raise BadParams(f"vertex count must be positive, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if v in nbrs[u]:
            raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
        nbrs[u].add(v)
        nbrs[v].add(u)

    seen = _bfs_order(nbrs, 0)
    if len(seen) != n:
        raise NotConnected(f"only {len(seen)} of {n} vertices reachable from vertex 0")

    d = len(nbrs[0])
    for v in range(n):
        if len(nbrs[v]) != d:
            raise NotRegular(v, len(nbrs[v]), d)
    if d < 3:
        raise DegreeTooSmall(f"degree {d} < 3 (need q = d - 1 >= 2)")

    return Graph(n=n, adjacency=tuple(tuple(sorted(s)) for s in nbrs), degree=d)


def _bfs_order(nbrs, start):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    color[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if color[v] < 0:
                color[v] = 1 - color[u]
                queue.append(v)
            elif color[v] == color[u]:
                return False
    return True


# Petersen graph as two 5-cycles joined by spokes: outer ring C_5 on 0..4,
# inner pentagram on 5..9, spoke i -- 5+i.
_PETERSEN_OUTER = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
_PETERSEN_INNER = [(5, 7), (5, 8), (6, 8), (6, 9), (7, 9)]


def named_graph(name: str, params: Sequence[int] = ()) -> Graph:
    """Construct one of the named example graphs.

    ``complete m`` (m >= 4 vertices), ``complete_bipartite k`` (K_{k,k}, k >= 3),
    ``petersen`` and ``circular_ladder n`` (C_n x K_2, n >= 3).
    """
    params = [int(p) for p in params]
    if name == "complete":
        (m,) = _expect(name, params, 1)
        if m < 4:
            raise BadParams(f"complete graph needs m >= 4 vertices, got {m}")
        return build_graph(m, [(u, v) for u in range(m) for v in range(u + 1, m)])
    if name == "complete_bipartite":
        (k,) = _expect(name, params, 1)
        if k < 3:
            raise BadParams(f"complete_bipartite needs k >= 3, got {k}")
        return build_graph(2 * k, [(u, k + v) for u in range(k) for v in range(k)])
    if name == "petersen":
        _expect(name, params, 0)
        spokes = [(i, 5 + i) for i in range(5)]
        return build_graph(10, _PETERSEN_OUTER + _PETERSEN_INNER + spokes)
    if name == "circular_ladder":
        (m,) = _expect(name, params, 1)
        if m < 3:
            raise BadParams(f"circular_ladder needs n >= 3, got {m}")
        edges = []
        for i in range(m):
            edges.append((i, (i + 1) % m))
            edges.append((m + i, m + (i + 1) % m))
            edges.append((i, m + i))
        return build_graph(2 * m, edges)
    raise UnknownName(f"unknown graph name {name!r}; expected one of {', '.join(NAMED_GRAPHS)}")


def _expect(name, params, count):
    if len(params) != count:
        raise BadParams(f"{name} takes {count} integer parameter(s), got {len(params)}")
    return params


def parse_graph_file(text: str | bytes) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list format. '#' starts a comment line."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphSyntaxError(lineno, f"expected two integers, got {line!r}")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphSyntaxError(lineno, f"non-integer field in {line!r}") from None
        if header is None:
            if a <= 0 or b < 0:
                raise GraphSyntaxError(lineno, "header must be 'n m' with n > 0, m >= 0")
            header = (a, b)
        else:
            if len(edges) == header[1]:
                raise GraphSyntaxError(lineno, f"more than the declared {header[1]} edges")
            edges.append((a, b))
    if header is None:
        raise GraphSyntaxError(1, "missing 'n m' header")
    if len(edges) != header[1]:
        raise GraphSyntaxError(lineno if text else 1, f"declared {header[1]} edges, found {len(edges)}")
    return build_graph(header[0], edges)


def write_graph_file(g: Graph) -> bytes:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return ("\n".join(lines) + "\n").encode("utf-8")
