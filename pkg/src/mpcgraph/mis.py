"""Randomized greedy maximal independent set and its rank-batched MPC simulation.

The greedy process visits vertices in a uniformly random order and keeps a
vertex unless a neighbor was already kept. The MPC version replays the same
order in rank batches: batch ``i`` covers the still-undecided vertices with
rank below ``n / Delta**(alpha**i)``, is shipped to a single machine, and is
resolved greedily there. Since every batch is resolved in rank order after all
lower ranks are settled, the output equals the sequential greedy MIS exactly.

Once the residual graph (edges plus vertices) fits on one machine, or its max
degree falls to the ``degree_floor``, the residual is gathered and finished in
one round. This finish rule stands in for the sparse-graph MIS subroutine
normally used for the polylog-degree residual and is recorded in the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._random import make_rng
from .graph import Graph
from .mpc import MpcConfig, RoundTrace, account_round

FINISH_RULE = (
    "sparse-residual MIS subroutine replaced by rank batching until the residual "
    "fits one machine, then a single-machine greedy finish"
)


@dataclass(frozen=True)
class RankPermutation:
    """``rank[v]`` is the 0-based position of ``v`` in the greedy order."""

    rank: np.ndarray
    seed: int | None = None

    @classmethod
    def from_seed(cls, n: int, seed: int) -> "RankPermutation":
        order = make_rng(seed).permutation(n)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        return cls(rank, seed)

    @classmethod
    def from_order(cls, order) -> "RankPermutation":
        order = np.asarray(order, dtype=np.int64)
        rank = np.empty(order.size, dtype=np.int64)
        rank[order] = np.arange(order.size)
        return cls(rank)

    @property
    def order(self) -> np.ndarray:
        return np.argsort(self.rank, kind="stable")

    def is_bijection(self) -> bool:
        return np.array_equal(np.sort(self.rank), np.arange(self.rank.size))


@dataclass(frozen=True)
class IndependentSet:
    members: np.ndarray  # sorted vertex ids

    def __len__(self) -> int:
        return int(self.members.size)

    def as_set(self) -> set[int]:
        return set(self.members.tolist())


@dataclass(frozen=True)
class BatchSchedule:
    """Rank cutoffs ``r_i = n / Delta**(alpha**i)`` plus the finish rule knobs.

    ``fit_cutoff=None`` means "the machine budget of the config in use".
    """

    alpha: float = 0.75
    degree_floor: int = 0
    fit_cutoff: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def cutoffs(self, n: int, max_degree: int):
        """Yield strictly increasing cutoffs ending at ``n``."""
        prev = 0
        i = 1
        while prev < n:
            if max_degree <= 1:
                r = n
            else:
                r = int(math.floor(n / max_degree ** (self.alpha**i)))
            r = min(max(prev + 1, r), n)
            yield r
            prev = r
            i += 1


def batch_phase_bound(max_degree: int, alpha: float = 0.75) -> int:
    """``ceil(log_{1/alpha} log2 Delta)``, the batch count before ranks pass n/2."""
    if max_degree <= 2:
        return 0
    return max(0, math.ceil(math.log(math.log2(max_degree)) / math.log(1 / alpha)))


@dataclass(frozen=True)
class MisVerdict:
    ok: bool
    edge: tuple[int, int] | None = None
    vertex: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def sequential_greedy_mis(g: Graph, pi: RankPermutation) -> IndependentSet:
    """Reference greedy MIS: scan vertices by increasing rank."""
    blocked = np.zeros(g.n, dtype=bool)
    chosen = []
    for v in pi.order.tolist():
        if blocked[v]:
            continue
        chosen.append(v)
        blocked[g.indices[g.indptr[v] : g.indptr[v + 1]]] = True
    return IndependentSet(np.array(sorted(chosen), dtype=np.int64))


def _greedy_decide(g: Graph, pi: RankPermutation, upto: int) -> tuple[np.ndarray, np.ndarray]:
    """Run greedy over ranks ``< upto``; return (in_mis, decided) masks."""
    in_mis = np.zeros(g.n, dtype=bool)
    decided = np.zeros(g.n, dtype=bool)
    for v in pi.order[:upto].tolist():
        if decided[v]:
            continue
        in_mis[v] = True
        decided[v] = True
        decided[g.indices[g.indptr[v] : g.indptr[v + 1]]] = True
    return in_mis, decided


def residual_graph(g: Graph, pi: RankPermutation, r: int) -> Graph:
    """Graph on the vertices still undecided after greedy processed ranks ``< r``.

    Vertex ids are preserved; decided vertices stay as isolated vertices, so
    degrees can be read off directly.
    """
    if not 0 <= r <= g.n:
        raise ValueError(f"rank {r} outside [0, {g.n}]")
    _, decided = _greedy_decide(g, pi, r)
    if g.m == 0:
        return Graph.empty(g.n)
    keep = ~decided[g.edges[:, 0]] & ~decided[g.edges[:, 1]]
    return Graph(g.n, g.edges[keep])


def mpc_greedy_mis(
    g: Graph,
    seed: int,
    cfg: MpcConfig | None = None,
    sched: BatchSchedule | None = None,
) -> tuple[IndependentSet, RoundTrace]:
    """Rank-batched MPC simulation of the greedy MIS for the permutation of ``seed``."""
    cfg = cfg or MpcConfig()
    sched = sched or BatchSchedule()
    pi = RankPermutation.from_seed(g.n, seed)
    trace = RoundTrace(g.n)
    fit_cutoff = cfg.budget(g.n) if sched.fit_cutoff is None else sched.fit_cutoff

    rank = pi.rank
    eu = g.edges[:, 0].astype(np.int64)
    ev = g.edges[:, 1].astype(np.int64)
    undecided = np.ones(g.n, dtype=bool)
    in_mis = np.zeros(g.n, dtype=bool)
    # edges with both endpoints undecided; shrinks as batches settle vertices
    live = np.arange(g.m)
    phase = 0

    cutoffs = sched.cutoffs(g.n, g.max_degree)
    while undecided.any():
        live = live[undecided[eu[live]] & undecided[ev[live]]]
        res_deg = np.bincount(eu[live], minlength=g.n) + np.bincount(ev[live], minlength=g.n)
        verts = np.flatnonzero(undecided)
        # the finishing machine stores the residual edges and vertices
        if live.size + verts.size <= fit_cutoff or res_deg.max() <= sched.degree_floor:
            account_round(trace, [live.size + verts.size], cfg, "finish", phase)
            trace.note_substitution(FINISH_RULE)
            _resolve(g, verts[np.argsort(rank[verts])], undecided, in_mis)
            break

        cutoff = next(cutoffs)
        batch = np.flatnonzero(undecided & (rank < cutoff))
        in_batch = np.zeros(g.n, dtype=bool)
        in_batch[batch] = True
        batch_edges = int(np.count_nonzero(in_batch[eu[live]] & in_batch[ev[live]]))
        phase += 1
        account_round(trace, [batch_edges + batch.size], cfg, "batch", phase)
        _resolve_batch(g, batch[np.argsort(rank[batch])], in_batch, undecided, in_mis)
    trace.phase_count = phase
    return IndependentSet(np.flatnonzero(in_mis)), trace


def _resolve_batch(g, ordered, in_batch, undecided, in_mis) -> None:
    # the hosting machine only sees edges inside the batch
    local_block = np.zeros(g.n, dtype=bool)
    winners = []
    for v in ordered.tolist():
        if local_block[v]:
            continue
        winners.append(v)
        nbrs = g.indices[g.indptr[v] : g.indptr[v + 1]]
        local_block[nbrs[in_batch[nbrs]]] = True
    _broadcast(g, winners, ordered, undecided, in_mis)


def _resolve(g, ordered, undecided, in_mis) -> None:
    block = np.zeros(g.n, dtype=bool)
    winners = []
    for v in ordered.tolist():
        if block[v]:
            continue
        winners.append(v)
        block[g.indices[g.indptr[v] : g.indptr[v + 1]]] = True
    _broadcast(g, winners, ordered, undecided, in_mis)


def _broadcast(g, winners, processed, undecided, in_mis) -> None:
    """Apply a machine's result globally: winners join, their neighbors drop out."""
    winners = np.asarray(winners, dtype=np.int64)
    in_mis[winners] = True
    undecided[processed] = False
    if winners.size:
        starts = g.indptr[winners]
        ends = g.indptr[winners + 1]
        nbrs = np.concatenate([g.indices[a:b] for a, b in zip(starts.tolist(), ends.tolist())])
        undecided[nbrs] = False


def verify_mis(g: Graph, members) -> MisVerdict:
    """Check independence, then maximality; report the first violation found."""
    if isinstance(members, IndependentSet):
        members = members.members
    elif not isinstance(members, np.ndarray):
        members = list(members)
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(members, dtype=np.int64)] = True
    if g.m:
        both = inside[g.edges[:, 0]] & inside[g.edges[:, 1]]
        hit = np.flatnonzero(both)
        if hit.size:
            a, b = g.edges[hit[0]]
            return MisVerdict(False, edge=(int(a), int(b)))
    dominated = inside.copy()
    if g.m:
        dominated[g.edges[inside[g.edges[:, 0]], 1]] = True
        dominated[g.edges[inside[g.edges[:, 1]], 0]] = True
    free = np.flatnonzero(~dominated)
    if free.size:
        return MisVerdict(False, vertex=int(free[0]))
    return MisVerdict(True)
