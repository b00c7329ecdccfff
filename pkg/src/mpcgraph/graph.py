"""Undirected simple graphs with canonical edge identities.

Vertices are dense integers ``0..n-1``. Every edge is stored once as a pair
``(u, v)`` with ``u < v``; the position of that pair in ``Graph.edges`` (sorted
lexicographically) is its edge id, so per-edge data such as fractional weights
lives in a flat array indexed by edge id.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable

import numba
import numpy as np


class EdgeListError(ValueError):
    """Malformed edge-list input; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _index_dtype(n: int):
    return np.int32 if n < 2**31 - 1 else np.int64


class Graph:
    """Immutable undirected simple graph in CSR form.

    Attributes:
        n: number of vertices.
        edges: ``(m, 2)`` array of canonical pairs, sorted, ``u < v``.
        indptr, indices: CSR adjacency with sorted neighbor lists.
    """

    __slots__ = ("n", "edges", "indptr", "indices", "__dict__")

    def __init__(self, n: int, edges: np.ndarray):
        # trusted path: ``edges`` must already be canonical, unique and sorted
        self.n = int(n)
        dtype = _index_dtype(self.n)
        edges = np.ascontiguousarray(edges, dtype=dtype).reshape(-1, 2)
        self.edges = edges
        self.indptr, self.indices = _build_csr(self.n, edges)
        for arr in (self.edges, self.indptr, self.indices):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        """Build a graph from arbitrary pairs, collapsing duplicates.

        Raises ValueError on self-loops or ids outside ``[0, n)``.
        """
        arr = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"vertex id out of range [0, {n})")
        loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
        if loops.size:
            raise ValueError(f"self-loop at vertex {arr[loops[0], 0]}")
        return cls(n, canonical_edges(n, arr))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.empty((0, 2), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @cached_property
    def adj_eid(self) -> np.ndarray:
        """Edge id of every CSR slot (aligned with ``indices``)."""
        u = self.edges[:, 0]
        v = self.edges[:, 1]
        deg_rev = np.bincount(v, minlength=self.n).astype(np.int64)
        scratch = np.empty_like(self.indices)
        eid = np.empty(2 * self.m, dtype=np.int64)
        _csr_fill(u, v, self.indptr, deg_rev, scratch, eid, True)
        eid.setflags(write=False)
        return eid

    def edge_id(self, u: int, v: int) -> int:
        """Edge id of ``{u, v}``; KeyError if absent."""
        if u > v:
            u, v = v, u
        row = self.neighbors(u)
        pos = int(np.searchsorted(row, v))
        if pos >= row.size or row[pos] != v:
            raise KeyError((u, v))
        return int(self.adj_eid[self.indptr[u] + pos])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = int(np.searchsorted(row, v))
        return pos < row.size and row[pos] == v

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def canonical_edges(n: int, arr: np.ndarray) -> np.ndarray:
    """Orient pairs as ``u < v``, drop duplicates and sort."""
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    u = np.minimum(arr[:, 0], arr[:, 1]).astype(np.int64)
    v = np.maximum(arr[:, 0], arr[:, 1]).astype(np.int64)
    keys = np.unique(u * n + v)
    return np.stack((keys // n, keys % n), axis=1)


@numba.njit(cache=True)
def _csr_fill(u, v, indptr, deg_rev, indices, eid, with_eid):
    # edges arrive sorted by (u, v): appending in order keeps every row sorted,
    # smaller neighbors first, then larger ones
    rev = indptr[:-1].copy()
    fwd = indptr[:-1] + deg_rev
    for e in range(u.shape[0]):
        a = u[e]
        b = v[e]
        indices[rev[b]] = a
        indices[fwd[a]] = b
        if with_eid:
            eid[rev[b]] = e
            eid[fwd[a]] = e
        rev[b] += 1
        fwd[a] += 1


def _build_csr(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = edges[:, 0]
    v = edges[:, 1]
    deg_rev = np.bincount(v, minlength=n).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(u, minlength=n) + deg_rev, out=indptr[1:])
    indices = np.empty(2 * edges.shape[0], dtype=edges.dtype)
    _csr_fill(u, v, indptr, deg_rev, indices, np.empty(0, dtype=np.int64), False)
    return indptr, indices


def induced_subgraph(g: Graph, keep) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``keep``.

    Returns the subgraph (vertices relabeled ``0..k-1`` in increasing original
    id) and the array mapping new ids to original ids.
    """
    keep = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep, dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] >= g.n):
        raise ValueError("keep contains vertices outside the graph")
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(keep.size)
    if g.m:
        a = new_id[g.edges[:, 0]]
        b = new_id[g.edges[:, 1]]
        mask = (a >= 0) & (b >= 0)
        sub_edges = np.stack((a[mask], b[mask]), axis=1)
    else:
        sub_edges = np.empty((0, 2), dtype=np.int64)
    # relabeling is monotone, so the filtered list stays canonical and sorted
    return Graph(keep.size, sub_edges), keep


def load_edge_list(stream: IO[str]) -> tuple[Graph, dict[int, int]]:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped. Vertex ids may be
    sparse; they are remapped to ``0..n-1`` in increasing order and the mapping
    ``original -> dense`` is returned alongside the graph.
    """
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(lineno, f"expected two vertex ids, got {len(parts)} fields")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(lineno, f"non-integer vertex id in {line!r}") from None
        if a < 0 or b < 0:
            raise EdgeListError(lineno, "negative vertex id")
        if a == b:
            raise EdgeListError(lineno, f"self-loop at vertex {a}")
        pairs.append((a, b))
    ids = sorted({x for p in pairs for x in p})
    remap = {orig: i for i, orig in enumerate(ids)}
    dense = np.array([(remap[a], remap[b]) for a, b in pairs], dtype=np.int64).reshape(-1, 2)
    return Graph(len(ids), canonical_edges(len(ids), dense)), remap


def read_edge_list(path) -> tuple[Graph, dict[int, int]]:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, stream: IO[str], labels: np.ndarray | None = None) -> None:
    """Write one ``u v`` line per edge, optionally translating ids via ``labels``."""
    edges = g.edges if labels is None else np.asarray(labels)[g.edges]
    for a, b in edges:
        stream.write(f"{a} {b}\n")


@dataclass(frozen=True)
class GraphCheck:
    symmetric: bool
    sorted_rows: bool
    loop_free: bool
    edge_count_ok: bool

    def __bool__(self) -> bool:
        return self.symmetric and self.sorted_rows and self.loop_free and self.edge_count_ok


def check_graph(g: Graph) -> GraphCheck:
    """Full scan of the structural invariants."""
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    cols = g.indices.astype(np.int64)
    fwd = set(zip(rows.tolist(), cols.tolist()))
    symmetric = all((b, a) in fwd for a, b in fwd)
    sorted_rows = all(
        np.all(np.diff(g.neighbors(v)) > 0) for v in range(g.n) if g.degree(v) > 1
    )
    loop_free = not np.any(rows == cols)
    edge_count_ok = int(g.degrees.sum()) == 2 * g.m
    return GraphCheck(symmetric, sorted_rows, loop_free, edge_count_ok)
