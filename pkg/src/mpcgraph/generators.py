"""Seeded graph generators used as benchmark and test instances."""

from __future__ import annotations

import math

import numpy as np

from ._random import make_rng
from .graph import Graph


def _pair_from_index(n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of pairs ``u < v``."""
    k = k.astype(np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(float(b) * b - 8.0 * k)) / 2).astype(np.int64)
    # float rounding can land one row off in either direction
    start = u * (2 * n - u - 1) // 2
    over = start > k
    u[over] -= 1
    start = u * (2 * n - u - 1) // 2
    nxt = (u + 1) * (2 * n - u - 2) // 2
    under = nxt <= k
    u[under] += 1
    start = u * (2 * n - u - 1) // 2
    v = k - start + u + 1
    return u, v


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each of the C(n, 2) pairs independently with prob. p.

    Uses geometric skipping over the pair enumeration, so the cost is
    proportional to the number of edges drawn.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph.empty(n)
    if p == 1.0:
        return Graph(n, np.stack(_pair_from_index(n, np.arange(total)), axis=1))
    rng = make_rng(seed)
    chunk = 1 << 22
    dtype = np.int32 if n < 2**31 - 1 else np.int64
    parts = []
    pos = -1
    while pos < total - 1:
        idx = pos + np.cumsum(rng.geometric(p, size=chunk))
        pos = int(idx[-1])
        if pos >= total:
            idx = idx[idx < total]
        u, v = _pair_from_index(n, idx)
        parts.append(np.stack((u.astype(dtype), v.astype(dtype)), axis=1))
    return Graph(n, np.concatenate(parts))


def gen_bipartite_gnp(n_left: int, n_right: int, p: float, seed: int) -> Graph:
    """Random bipartite graph; left side is ``0..n_left-1``."""
    rng = make_rng(seed)
    mask = rng.random((n_left, n_right)) < p
    u, v = np.nonzero(mask)
    return Graph(n_left + n_right, np.stack((u, v + n_left), axis=1))


def star(leaves: int) -> Graph:
    """K_{1,leaves} with center 0."""
    leaf = np.arange(1, leaves + 1)
    return Graph(leaves + 1, np.stack((np.zeros_like(leaf), leaf), axis=1))


def complete(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.stack((u, v), axis=1))


def disjoint_edges(k: int) -> Graph:
    """Perfect matching on ``2k`` vertices: edges ``(2i, 2i+1)``."""
    a = 2 * np.arange(k)
    return Graph(2 * k, np.stack((a, a + 1), axis=1))


def path(n: int) -> Graph:
    a = np.arange(max(n - 1, 0))
    return Graph(n, np.stack((a, a + 1), axis=1))


def cycle(n: int) -> Graph:
    a = np.arange(n)
    return Graph.from_edges(n, np.stack((a, (a + 1) % n), axis=1))


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    pairs = [(v, v ^ (1 << b)) for v in range(n) for b in range(dim) if v < v ^ (1 << b)]
    return Graph.from_edges(n, pairs)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def powerlaw(n: int, exponent: float, seed: int, avg_degree: float = 8.0) -> Graph:
    """Chung-Lu graph with expected degrees following a power law.

    Vertex ``i`` gets weight proportional to ``(i + 1) ** (-1 / (exponent - 1))``
    rescaled to mean ``avg_degree``; pair ``{i, j}`` is present independently
    with probability ``min(1, w_i w_j / sum(w))``. Sampled with the
    Miller-Hagberg skipping scheme, O(n + m).
    """
    if exponent <= 2.0:
        raise ValueError("exponent must exceed 2")
    rng = make_rng(seed)
    w = (np.arange(1, n + 1, dtype=np.float64)) ** (-1.0 / (exponent - 1.0))
    w *= avg_degree / w.mean()
    total = float(w.sum())
    us: list[int] = []
    vs: list[int] = []
    # weights are non-increasing in i, which the skipping relies on
    for u in range(n - 1):
        v = u + 1
        p = min(w[u] * w[v] / total, 1.0)
        while v < n and p > 0:
            if p != 1.0:
                r = rng.random()
                v += int(math.floor(math.log(r) / math.log1p(-p)))
            if v < n:
                q = min(w[u] * w[v] / total, 1.0)
                if rng.random() < q / p:
                    us.append(u)
                    vs.append(v)
                p = q
                v += 1
    return Graph(n, np.array([us, vs], dtype=np.int64).T.reshape(-1, 2))


def from_spec(spec: str, seed: int = 0) -> Graph:
    """Build a graph from ``kind:arg,arg``.

    Kinds: ``gnp:n,p``, ``bipartite:l,r,p``, ``star:leaves``, ``complete:n``,
    ``disjoint_edges:k``, ``powerlaw:n,exponent``, ``path:n``, ``cycle:n``,
    ``hypercube:d``, ``petersen``.
    """
    kind, _, rest = spec.partition(":")
    args = [a for a in rest.split(",") if a]
    try:
        if kind == "gnp":
            return gen_gnp(int(args[0]), float(args[1]), seed)
        if kind == "bipartite":
            return gen_bipartite_gnp(int(args[0]), int(args[1]), float(args[2]), seed)
        if kind == "star":
            return star(int(args[0]))
        if kind == "complete":
            return complete(int(args[0]))
        if kind == "disjoint_edges":
            return disjoint_edges(int(args[0]))
        if kind == "powerlaw":
            return powerlaw(int(args[0]), float(args[1]), seed)
        if kind == "path":
            return path(int(args[0]))
        if kind == "cycle":
            return cycle(int(args[0]))
        if kind == "hypercube":
            return hypercube(int(args[0]))
        if kind == "petersen":
            return petersen()
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown generator kind {kind!r}")
