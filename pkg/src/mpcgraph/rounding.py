"""Rounding a fractional matching to an integral one, and the iterated pipeline.

Rounding: every candidate vertex ``v`` proposes to neighbor ``u`` with
probability ``x_uv / 10`` and to nobody otherwise. The proposals form an edge
set ``H`` (a mutual proposal is one edge); an edge of ``H`` with no other
``H`` edge touching it is *good*, and the good edges are a matching.

The iterated pipeline repeatedly computes a fractional matching with the MPC
simulation, rounds it on the heavy cover vertices, and deletes the matched
vertices. Whatever is left at the end is finished by a filtering maximal
matching, which is also the second contender in ``best_of``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numba
import numpy as np

from ._random import derive_seed, make_rng
from .graph import Graph, induced_subgraph
from .matching import FractionalMatching, SimulationKnobs, mpc_simulation
from .mpc import MpcConfig, RoundTrace, account_round

STAR = -1
_Y_TOL = 1e-9

RESIDUAL_FINISH = (
    "iterated rounding runs its full iteration budget (or until no edge is left) "
    "and hands the residual to the filtering maximal matching"
)


@dataclass(frozen=True)
class Matching:
    edges: np.ndarray  # (k, 2), u < v, sorted

    @classmethod
    def from_pairs(cls, pairs) -> "Matching":
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        arr = np.sort(arr, axis=1)
        if arr.size:
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
        return cls(arr)

    def __len__(self) -> int:
        return int(self.edges.shape[0])

    def vertices(self) -> np.ndarray:
        return self.edges.ravel()

    def write(self, stream: IO[str]) -> None:
        for a, b in self.edges.tolist():
            stream.write(f"{a} {b}\n")


@dataclass(frozen=True)
class MatchingVerdict:
    ok: bool
    vertex: int | None = None  # shared by two edges
    edge: tuple[int, int] | None = None  # not an edge of the graph

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ProposalOutcome:
    """``choice[i]`` is the neighbor ``vertices[i]`` proposed to, or STAR."""

    vertices: np.ndarray
    choice: np.ndarray


def verify_matching(g: Graph, m: Matching) -> MatchingVerdict:
    edges = m.edges
    if edges.size == 0:
        return MatchingVerdict(True)
    for a, b in edges.tolist():
        if a == b or not g.has_edge(a, b):
            return MatchingVerdict(False, edge=(a, b))
    counts = np.bincount(edges.ravel(), minlength=g.n)
    shared = np.flatnonzero(counts > 1)
    if shared.size:
        return MatchingVerdict(False, vertex=int(shared[0]))
    return MatchingVerdict(True)


@numba.njit(cache=True)
def _propose(vertices, draws, indptr, indices, eid, x, out):
    for i in range(vertices.shape[0]):
        v = vertices[i]
        r = draws[i] * 10.0
        acc = 0.0
        out[i] = -1
        for s in range(indptr[v], indptr[v + 1]):
            acc += x[eid[s]]
            if r < acc:
                out[i] = indices[s]
                break


def _edge_weights(x) -> np.ndarray:
    return x.x if isinstance(x, FractionalMatching) else np.asarray(x, dtype=np.float64)


def propose(g: Graph, x, cand, seed: int) -> ProposalOutcome:
    """Draw ``X_v`` for each ``v`` in ``cand`` (taken in increasing order)."""
    verts = np.unique(np.asarray(list(cand) if not isinstance(cand, np.ndarray) else cand, dtype=np.int64))
    draws = make_rng(seed).random(verts.size)
    out = np.empty(verts.size, dtype=np.int64)
    if verts.size:
        _propose(verts, draws, g.indptr, g.indices, g.adj_eid, _edge_weights(x), out)
    return ProposalOutcome(verts, out)


def good_edges(outcome: ProposalOutcome, n: int) -> np.ndarray:
    """Edges of ``H`` with no other ``H`` edge incident, as sorted ``(k, 2)``."""
    chose = outcome.choice != STAR
    a = outcome.vertices[chose]
    b = outcome.choice[chose]
    if a.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    keys = np.unique(lo * n + hi)  # a mutual proposal is one edge
    lo, hi = keys // n, keys % n
    deg = np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)
    good = (deg[lo] == 1) & (deg[hi] == 1)
    return np.stack((lo[good], hi[good]), axis=1)


def round_matching(g: Graph, x, cover, seed: int) -> Matching:
    """Round fractional weights ``x`` with proposals from the vertices in ``cover``."""
    w = _edge_weights(x)
    if w.shape != (g.m,):
        raise ValueError("x must hold one weight per edge")
    if g.m:
        y = np.bincount(g.edges[:, 0], w, minlength=g.n) + np.bincount(g.edges[:, 1], w, minlength=g.n)
        if np.any(w < 0) or y.max() > 1.0 + _Y_TOL:
            v = int(np.argmax(y))
            raise ValueError(f"not a fractional matching: y({v}) = {y[v]!r}")
    return Matching(good_edges(propose(g, w, cover, seed), g.n))


@numba.njit(cache=True)
def _greedy_pick(eu, ev, matched, take):
    k = 0
    for i in range(eu.shape[0]):
        a = eu[i]
        b = ev[i]
        if not matched[a] and not matched[b]:
            matched[a] = True
            matched[b] = True
            take[i] = True
            k += 1
    return k


def small_matching_fallback(
    g: Graph,
    cfg: MpcConfig | None = None,
    seed: int = 0,
    trace: RoundTrace | None = None,
) -> Matching:
    """Filtering maximal matching.

    While more than ``c * n`` edges remain, sample each remaining edge with
    probability ``budget / (2 |E|)``, match greedily among the sample on one
    machine and drop the matched vertices. The final residual is gathered and
    finished greedily, so the output is a maximal matching of ``g``.
    """
    cfg = cfg or MpcConfig()
    trace = trace if trace is not None else RoundTrace(g.n)
    budget = cfg.budget(g.n)
    rng = make_rng(seed)
    eu = g.edges[:, 0].astype(np.int64)
    ev = g.edges[:, 1].astype(np.int64)
    matched = np.zeros(g.n, dtype=bool)
    chosen = []
    phase = trace.rounds[-1].phase + 1 if trace.rounds else 0
    while eu.size > budget:
        pick = rng.random(eu.size) < budget / (2.0 * eu.size)
        su, sv = eu[pick], ev[pick]
        account_round(trace, [su.size], cfg, "filter", phase)
        take = np.zeros(su.size, dtype=bool)
        _greedy_pick(su, sv, matched, take)
        chosen.append(np.stack((su[take], sv[take]), axis=1))
        keep = ~matched[eu] & ~matched[ev]
        eu, ev = eu[keep], ev[keep]
    if eu.size or not trace.rounds:
        account_round(trace, [eu.size], cfg, "gather", phase)
    take = np.zeros(eu.size, dtype=bool)
    _greedy_pick(eu, ev, matched, take)
    chosen.append(np.stack((eu[take], ev[take]), axis=1))
    return Matching.from_pairs(np.concatenate(chosen))


def iteration_budget(eps: float) -> int:
    """``ceil(log_{150/149}(1/eps))``."""
    return max(1, math.ceil(math.log(1.0 / eps) / math.log(150.0 / 149.0)))


def iterated_matching(
    g: Graph,
    eps: float,
    seed: int,
    cfg: MpcConfig | None = None,
    knobs: SimulationKnobs | None = None,
    iterations: int | None = None,
) -> tuple[Matching, RoundTrace]:
    """Union of rounded matchings over successive residual graphs.

    Each iteration runs the MPC simulation with parameter ``eps / 50`` on the
    non-isolated unmatched vertices, rounds on the cover vertices of weight at
    least ``1 - 5 eps/50`` and removes the matched vertices. The loop stops
    after ``iteration_budget(eps)`` iterations or once no edge is left; the
    residual is finished by ``small_matching_fallback``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    cfg = cfg or MpcConfig()
    inner = eps / 50.0
    rounds = iteration_budget(eps) if iterations is None else iterations
    trace = RoundTrace(g.n)
    matched = np.zeros(g.n, dtype=bool)
    picked = []
    eu, ev = g.edges[:, 0], g.edges[:, 1]
    for i in range(rounds):
        live = ~matched[eu] & ~matched[ev]
        if not live.any():
            break
        verts = np.unique(np.concatenate((eu[live], ev[live])))
        sub, ids = induced_subgraph(g, verts)
        fm, cover, sub_trace = mpc_simulation(sub, inner, derive_seed(seed, i, 0), cfg, knobs)
        trace.extend(sub_trace)
        members = cover.members
        heavy = members[fm.y[members] >= 1.0 - 5.0 * inner]
        m = round_matching(sub, fm, heavy, derive_seed(seed, i, 1))
        if len(m):
            orig = ids[m.edges]
            matched[orig.ravel()] = True
            picked.append(orig)
    trace.note_substitution(RESIDUAL_FINISH)
    live = ~matched[eu] & ~matched[ev]
    if live.any():
        verts = np.unique(np.concatenate((eu[live], ev[live])))
        sub, ids = induced_subgraph(g, verts)
        rest = small_matching_fallback(sub, cfg, derive_seed(seed, rounds, 2), trace)
        if len(rest):
            picked.append(ids[rest.edges])
    if not picked:
        return Matching(np.empty((0, 2), dtype=np.int64)), trace
    return Matching.from_pairs(np.concatenate(picked)), trace


def best_of(
    g: Graph,
    eps: float,
    seed: int,
    cfg: MpcConfig | None = None,
    knobs: SimulationKnobs | None = None,
) -> Matching:
    """The larger of the iterated matching and the filtering maximal matching.

    Both are verified; an invalid contender raises AssertionError.
    """
    a, _ = iterated_matching(g, eps, seed, cfg, knobs)
    b = small_matching_fallback(g, cfg, derive_seed(seed, 0xFA11))
    for cand in (a, b):
        verdict = verify_matching(g, cand)
        if not verdict:
            raise AssertionError(f"invalid matching produced: {verdict}")
    return a if len(a) >= len(b) else b
