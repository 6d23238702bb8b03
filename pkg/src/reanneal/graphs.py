"""Undirected simple graphs: construction, parsing, and random generation.

Node ids are dense 0-based integers. DIMACS input is 1-based and gets
shifted on parse. All generators draw from the SplitMix64 stream defined in
:mod:`reanneal.rng`, so a (params, seed) pair produces the same edge set on
every platform.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .rng import SplitMix64, uniform_block


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph input."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    ``edges`` holds normalized (i, j) pairs with i < j, sorted; ``neighbors``
    holds one sorted int64 array per node. Build instances through
    :meth:`from_edges` so the invariants (no self-loops, no duplicates, ids
    in range) are checked once up front.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[np.ndarray, ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValueError(f"node count must be non-negative, got {n}")
        normalized: set[tuple[int, int]] = set()
        for i, j in edges:
            if i == j:
                raise GraphFormatError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphFormatError(f"edge ({i}, {j}) out of range for n={n}")
            pair = (i, j) if i < j else (j, i)
            if pair in normalized:
                raise GraphFormatError(f"duplicate edge ({pair[0]}, {pair[1]})")
            normalized.add(pair)
        ordered = tuple(sorted(normalized))
        adj: list[list[int]] = [[] for _ in range(n)]
        for i, j in ordered:
            adj[i].append(j)
            adj[j].append(i)
        neighbors = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
        return cls(n=n, edges=ordered, neighbors=neighbors)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays (u, v) with u < v, aligned with ``edges``."""
        if not self.edges:
            empty = np.array([], dtype=np.int64)
            return empty, empty
        arr = np.array(self.edges, dtype=np.int64)
        return arr[:, 0], arr[:, 1]


def parse_edge_list(text: str) -> Graph:
    """Parse a whitespace edge list, with an optional leading "n m" header.

    Lines starting with '#' are comments. The first data line "a b" is read
    as a header when b equals the number of data lines that follow;
    otherwise every data line is an edge and n = 1 + max node id (0 for an
    empty list). Duplicate edges and self-loops are rejected.
    """
    rows: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(
                f"line {lineno}: expected two integers, got {line!r}"
            ) from None
        rows.append((lineno, a, b))

    if not rows:
        return Graph.from_edges(0, [])

    first_lineno, a, b = rows[0]
    has_header = a >= 0 and b == len(rows) - 1
    if has_header:
        n, data = a, rows[1:]
    else:
        data = rows
        n = 1 + max(max(i, j) for _, i, j in data) if data else 0

    edges: set[tuple[int, int]] = set()
    for lineno, i, j in data:
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop at node {i}")
        if i < 0 or j < 0:
            raise GraphFormatError(f"line {lineno}: negative node id")
        if has_header and (i >= n or j >= n):
            raise GraphFormatError(f"line {lineno}: node id >= declared n={n}")
        pair = (i, j) if i < j else (j, i)
        if pair in edges:
            raise GraphFormatError(f"line {lineno}: duplicate edge {pair}")
        edges.add(pair)
    return Graph.from_edges(n, edges)


def parse_dimacs(text: str) -> Graph:
    """Parse DIMACS "p edge n m" format with 1-based "e i j" lines.

    Duplicate edge lines are collapsed. A mismatch between the declared m
    and the distinct edge count is a warning, not an error.
    """
    n = None
    declared_m = 0
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: repeated problem line")
            if len(parts) != 4:
                raise GraphFormatError(f"line {lineno}: malformed problem line {line!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(
                    f"line {lineno}: malformed problem line {line!r}"
                ) from None
            if n < 0:
                raise GraphFormatError(f"line {lineno}: negative node count")
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before problem line")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: malformed edge line {line!r}")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(
                    f"line {lineno}: malformed edge line {line!r}"
                ) from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise GraphFormatError(f"line {lineno}: node id outside [1, {n}]")
            if i == j:
                raise GraphFormatError(f"line {lineno}: self-loop at node {i}")
            i, j = i - 1, j - 1
            edges.add((i, j) if i < j else (j, i))
        else:
            raise GraphFormatError(f"line {lineno}: unrecognized line {line!r}")
    if n is None:
        raise GraphFormatError("missing 'p edge n m' problem line")
    if len(edges) != declared_m:
        warnings.warn(
            f"DIMACS header declares {declared_m} edges, found {len(edges)} distinct",
            stacklevel=2,
        )
    return Graph.from_edges(n, edges)


def to_edge_list(g: Graph, header: bool = True) -> str:
    """Serialize in the edge-list format accepted by :func:`parse_edge_list`."""
    lines = []
    if header:
        lines.append(f"{g.n} {g.num_edges}")
    lines.extend(f"{i} {j}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.num_edges}"]
    lines.extend(f"e {i + 1} {j + 1}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p): each unordered pair kept independently w.p. p.

    Pair k in row-major order over i < j is kept iff the k-th SplitMix64
    uniform of ``seed`` is < p.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must be in [0, 1], got {p}")
    if n < 2:
        return Graph.from_edges(n, [])
    ii, jj = np.triu_indices(n, k=1)
    u = uniform_block(seed, len(ii))
    keep = u < p
    return Graph.from_edges(n, zip(ii[keep].tolist(), jj[keep].tolist()))


def gen_ba(n: int, m: int, seed: int) -> Graph:
    """Barabási–Albert preferential attachment.

    Starts from a star on m+1 nodes centered at node 0. Each node
    v = m+1, ..., n-1 then attaches to m distinct earlier nodes, drawn one
    at a time with probability proportional to current degree (uniform
    draws over the flat edge-endpoint list, redrawing duplicates). Total
    edges: m + m * (n - m - 1).
    """
    if m < 1 or m >= n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = SplitMix64(seed)
    edges: list[tuple[int, int]] = [(0, i) for i in range(1, m + 1)]
    endpoints: list[int] = []
    for i, j in edges:
        endpoints.extend((i, j))
    for v in range(m + 1, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            target = endpoints[rng.randint(len(endpoints))]
            if target not in chosen:
                chosen.add(target)
        for t in sorted(chosen):
            edges.append((t, v))
            endpoints.extend((t, v))
    return Graph.from_edges(n, edges)


def complement(g: Graph) -> Graph:
    """Graph on the same nodes whose edges are exactly the missing pairs."""
    present = g.edge_set()
    edges = [
        (i, j)
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if (i, j) not in present
    ]
    return Graph.from_edges(g.n, edges)


def is_connected(g: Graph) -> bool:
    """Breadth-first reachability from node 0 (vacuously true for n <= 1)."""
    if g.n <= 1:
        return True
    seen = np.zeros(g.n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in g.neighbors[i]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def sniff_format(text: str) -> str:
    """Guess "dimacs" vs "edgelist" from the leading data lines."""
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith(("p ", "c ", "e ")) or line in ("c", "p", "e"):
            return "dimacs"
        if line.startswith("#"):
            return "edgelist"
        return "edgelist"
    return "edgelist"


def parse_graph(text: str, fmt: str = "auto") -> Graph:
    if fmt == "auto":
        fmt = sniff_format(text)
    if fmt == "edgelist":
        return parse_edge_list(text)
    if fmt == "dimacs":
        return parse_dimacs(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
