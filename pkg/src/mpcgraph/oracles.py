"""Reference answers: exact maximum matching on small or bipartite graphs and
greedy maximal matchings."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .graph import Graph
from .rounding import Matching

DP_LIMIT = 24


class UnsupportedInstance(ValueError):
    """No exact method applies (too large and not bipartite)."""


@dataclass(frozen=True)
class ExactResult:
    value: int
    witness: Matching | None
    method: str  # "bitmask-dp" | "bipartite-augmenting"


def two_coloring(g: Graph) -> np.ndarray | None:
    """Side (0/1) of every vertex if ``g`` is bipartite, else None."""
    side = np.full(g.n, -1, dtype=np.int8)
    for root in range(g.n):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v).tolist():
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    queue.append(u)
                elif side[u] == side[v]:
                    return None
    return side


def _bipartite(g: Graph, side: np.ndarray) -> ExactResult:
    left = np.flatnonzero(side == 0)
    right = np.flatnonzero(side == 1)
    pos = np.empty(g.n, dtype=np.int64)
    pos[left] = np.arange(left.size)
    pos[right] = np.arange(right.size)
    a, b = g.edges[:, 0], g.edges[:, 1]
    lo = np.where(side[a] == 0, a, b)
    hi = np.where(side[a] == 0, b, a)
    adj = csr_matrix((np.ones(g.m, dtype=np.int8), (pos[lo], pos[hi])), shape=(left.size, right.size))
    mate = maximum_bipartite_matching(adj, perm_type="column")
    rows = np.flatnonzero(mate >= 0)
    pairs = np.stack((left[rows], right[mate[rows]]), axis=1)
    return ExactResult(int(rows.size), Matching.from_pairs(pairs), "bipartite-augmenting")


@numba.njit(cache=True)
def _dp(n, nbr):
    # best[mask] = maximum matching size inside vertex set ``mask``; the lowest
    # vertex of the mask is either left unmatched or matched to a neighbor
    best = np.zeros(1 << n, dtype=np.int8)
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = 0
        while (1 << v) != low:
            v += 1
        rest = mask ^ low
        top = best[rest]
        cand = nbr[v] & rest
        while cand:
            bit = cand & -cand
            cand ^= bit
            val = best[rest ^ bit] + 1
            if val > top:
                top = val
        best[mask] = top
    return best


def _bitmask(g: Graph) -> ExactResult:
    n = g.n
    nbr = np.zeros(max(n, 1), dtype=np.int64)
    for a, b in g.edges.tolist():
        nbr[a] |= 1 << b
        nbr[b] |= 1 << a
    if n == 0:
        return ExactResult(0, Matching.from_pairs([]), "bitmask-dp")
    best = _dp(n, nbr)
    # walk the table back to a witness
    mask = (1 << n) - 1
    pairs = []
    while mask:
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        if best[mask] == best[rest]:
            mask = rest
            continue
        cand = int(nbr[v]) & rest
        while cand:
            bit = cand & -cand
            cand ^= bit
            if best[rest ^ bit] + 1 == best[mask]:
                pairs.append((v, bit.bit_length() - 1))
                mask = rest ^ bit
                break
    return ExactResult(int(best[-1]), Matching.from_pairs(pairs), "bitmask-dp")


def exact_max_matching(g: Graph, method: str | None = None) -> ExactResult:
    """Maximum matching by bitmask DP (``n <= 24``) or augmenting paths (bipartite).

    ``method`` forces ``"bitmask-dp"`` or ``"bipartite-augmenting"``; by default
    bipartite graphs use augmenting paths and others the DP.
    """
    if method not in (None, "bitmask-dp", "bipartite-augmenting"):
        raise ValueError(f"unknown method {method!r}")
    if method != "bitmask-dp":
        side = two_coloring(g)
        if side is not None:
            return _bipartite(g, side)
        if method == "bipartite-augmenting":
            raise UnsupportedInstance("graph is not bipartite")
    if g.n <= DP_LIMIT:
        return _bitmask(g)
    raise UnsupportedInstance(f"n = {g.n} exceeds {DP_LIMIT} and the graph is not bipartite")


def greedy_maximal_matching(g: Graph, order=None) -> Matching:
    """Scan edges in ``order`` (edge ids or ``(u, v)`` pairs; default edge-id
    order) and keep each edge whose endpoints are both free."""
    if order is None:
        pairs = g.edges.tolist()
    else:
        order = list(order)
        if order and not np.isscalar(order[0]):
            pairs = [tuple(p) for p in order]
            for a, b in pairs:
                if not g.has_edge(a, b):
                    raise ValueError(f"({a}, {b}) is not an edge")
        else:
            pairs = g.edges[np.asarray(order, dtype=np.int64)].tolist() if order else []
        if len(pairs) != g.m:
            raise ValueError("order must list every edge exactly once")
    used = set()
    chosen = []
    for a, b in pairs:
        if a in used or b in used:
            continue
        used.add(a)
        used.add(b)
        chosen.append((a, b))
    return Matching.from_pairs(chosen)


def vc_lower_bound(g: Graph) -> int:
    """Size of a matching, which no vertex cover can undercut: exact when
    possible, greedy otherwise."""
    try:
        return exact_max_matching(g).value
    except UnsupportedInstance:
        return len(greedy_maximal_matching(g))
