"""Fractional matching and vertex cover by edge-weight freezing.

``central`` starts every edge at weight ``1/n`` and, once per iteration,
freezes each vertex whose weight ``y_v`` reached ``1 - 2 eps`` (together with
its edges), then scales the still-active edges by ``1/(1 - eps)``. Frozen
vertices form a vertex cover and the weights a fractional matching.

``central_rand`` replaces the fixed threshold with a fresh uniform draw from
``[1 - 4 eps, 1 - 2 eps]`` per vertex and iteration, supplied by a
``ThresholdSchedule``.

``mpc_simulation`` runs ``central_rand`` in phases: the degree bound ``d``
sets ``m = ceil(sqrt(d))`` machines, vertices are spread over them at random,
and each machine advances ``I`` iterations estimating weights from its local
edges scaled by ``m``. Between phases weights are reconciled, vertices above
weight 1 are dropped into the cover and vertices above ``1 - 2 eps`` freeze.
When ``d`` falls to ``d_floor`` the rest runs as plain ``central_rand``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO

import numpy as np

from . import _kernels as K
from ._random import STREAM_PARTITION, STREAM_THRESHOLD, stream_key
from .graph import Graph
from .mpc import MpcConfig, RoundTrace, account_rounds, account_segments, partition_vertices

FROZEN_TAG = "frozen"
REMOVED_TAG = "removed-heavy"
_CERT_TOL = 1e-9


def _check_eps(eps: float, upper: float, name: str) -> None:
    if not 0.0 < eps <= upper:
        raise ValueError(f"{name} needs 0 < eps <= {upper:g}, got {eps}")


@dataclass(frozen=True)
class ThresholdSchedule:
    """Seeded thresholds ``T(v, t)``, i.i.d. uniform on ``[1 - 4 eps, 1 - 2 eps)``.

    Values come from a counter-mode hash of ``(seed, v, t)``, so any entry can
    be read in O(1) and two algorithms holding equal schedules see equal
    thresholds. ``fixed`` pins every threshold to one constant instead.
    """

    eps: float
    seed: int = 0
    fixed: float | None = None

    @classmethod
    def constant(cls, eps: float, value: float | None = None) -> "ThresholdSchedule":
        return cls(eps, 0, 1.0 - 2.0 * eps if value is None else value)

    @cached_property
    def key(self) -> np.uint64:
        return stream_key(self.seed, STREAM_THRESHOLD)

    @property
    def lo(self) -> float:
        return 1.0 - 4.0 * self.eps

    @property
    def width(self) -> float:
        return 2.0 * self.eps

    def _params(self):
        return self.key, self.lo, self.width, -1.0 if self.fixed is None else float(self.fixed)

    def T(self, v: int, t: int) -> float:
        out = np.empty(1)
        self.values(np.array([v]), t, out)
        return float(out[0])

    def values(self, vertices, t: int, out: np.ndarray | None = None) -> np.ndarray:
        vs = np.asarray(vertices, dtype=np.int64)
        if out is None:
            out = np.empty(vs.size)
        K.thresholds_at(*self._params(), vs, np.int64(t), out)
        return out


@dataclass(frozen=True)
class SimulationKnobs:
    """Desk-scale knobs.

    ``d_floor``: the phase loop runs while ``d > d_floor``.
    ``single_machine``: force one machine per phase (the iteration count
    ``I`` still follows the nominal ``ceil(sqrt(d))``).
    ``iterations``: fixed ``I`` per phase. The formula gives ``I = 1`` unless
    ``m >= 5**10``, so this is the only way to run several local iterations
    per phase at desk scale.
    """

    d_floor: float = 64.0
    single_machine: bool = False
    iterations: int | None = None

    def __post_init__(self):
        if self.d_floor < 1:
            raise ValueError("d_floor must be >= 1")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    @classmethod
    def log20(cls, n: int) -> "SimulationKnobs":
        """Exit threshold ``log^20 n`` (exceeds n on every practical instance)."""
        return cls(d_floor=max(1.0, math.log(max(n, 2)) ** 20))


@dataclass(frozen=True)
class FractionalMatching:
    """Edge weights over ``graph.edges`` plus the surviving vertex set.

    ``x`` is indexed by edge id; edges touching a removed vertex carry 0.
    ``freeze_time[v]`` is the iteration ``v`` froze in, -1 if never.
    """

    graph: Graph
    x: np.ndarray
    alive: np.ndarray
    freeze_time: np.ndarray

    @cached_property
    def y(self) -> np.ndarray:
        e = self.graph.edges
        return np.bincount(e[:, 0], self.x, minlength=self.graph.n) + np.bincount(
            e[:, 1], self.x, minlength=self.graph.n
        )

    @property
    def total(self) -> float:
        return float(self.x.sum())

    def to_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["u", "v", "x_e", "frozen_iteration_u", "frozen_iteration_v"])
        ft = self.freeze_time
        for (u, v), w in zip(self.graph.edges.tolist(), self.x.tolist()):
            writer.writerow([u, v, repr(w), int(ft[u]), int(ft[v])])


@dataclass(frozen=True)
class VertexCover:
    members: np.ndarray  # sorted
    provenance: tuple[str, ...]  # aligned with members

    def __len__(self) -> int:
        return int(self.members.size)

    def as_dict(self) -> dict[int, str]:
        return dict(zip(self.members.tolist(), self.provenance))

    def write(self, stream: IO[str]) -> None:
        for v, tag in zip(self.members.tolist(), self.provenance):
            stream.write(f"{v} {tag}\n")


@dataclass(frozen=True)
class CoverVerdict:
    ok: bool
    edge: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PhaseRecord:
    phase: int
    machines: int
    iterations: int
    t_start: int
    d_start: float
    d_end: float
    max_active_degree: int
    local_edges: int
    removed: int
    late_frozen: int


def matching_weight(x: FractionalMatching, over=None) -> float:
    """``sum of y(v)`` over ``over`` (all vertices when None)."""
    if over is None:
        return float(x.y.sum())
    idx = np.asarray(list(over) if not isinstance(over, np.ndarray) else over)
    if idx.dtype == bool:
        return float(x.y[idx].sum())
    return float(x.y[idx.astype(np.int64)].sum())


def verify_vertex_cover(g: Graph, cover) -> CoverVerdict:
    members = cover.members if isinstance(cover, VertexCover) else np.asarray(list(cover), dtype=np.int64)
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    if g.m:
        bad = np.flatnonzero(~inside[g.edges[:, 0]] & ~inside[g.edges[:, 1]])
        if bad.size:
            a, b = g.edges[bad[0]]
            return CoverVerdict(False, (int(a), int(b)))
    return CoverVerdict(True)


def weight_table(w0: float, eps: float, n: int) -> np.ndarray:
    """``W[t] = w0 / (1 - eps)**t`` far enough for every edge to reach weight 1."""
    steps = math.ceil(math.log(1.0 / w0) / -math.log1p(-eps)) if w0 < 1 else 0
    return w0 / (1.0 - eps) ** np.arange(steps + 64, dtype=np.float64)


class _State:
    """Mutable per-run bookkeeping shared by the kernels."""

    def __init__(self, g: Graph):
        self.status = np.zeros(g.n, dtype=np.int8)
        self.ft = np.full(g.n, -1, dtype=np.int64)
        self.active_deg = g.degrees.astype(np.int64)
        self.frozen_sum = np.zeros(g.n)
        self.active_edges = g.m

    def outputs(self, g: Graph, W: np.ndarray) -> tuple[FractionalMatching, VertexCover]:
        status, ft = self.status, self.ft
        alive = status != K.REMOVED
        x = np.zeros(g.m)
        if g.m:
            a, b = g.edges[:, 0], g.edges[:, 1]
            keep = alive[a] & alive[b]
            big = np.iinfo(np.int64).max
            ta = np.where(status[a] == K.FROZEN, ft[a], big)
            tb = np.where(status[b] == K.FROZEN, ft[b], big)
            tmin = np.minimum(ta, tb)
            if np.any(keep & (tmin == big)):
                raise AssertionError("run ended with an unfrozen edge")
            x[keep] = W[tmin[keep]]
        members = np.flatnonzero((status == K.FROZEN) | (status == K.REMOVED))
        prov = tuple(FROZEN_TAG if status[v] == K.FROZEN else REMOVED_TAG for v in members.tolist())
        fm = FractionalMatching(g, x, alive, ft.copy())
        return fm, VertexCover(members, prov)


def _run_central(g, W, sched, state, t0=0, m_fin=0, mach=None, hosted=None):
    key, lo, width, fixed = sched._params()
    cand = np.flatnonzero(state.status == K.ACTIVE).astype(np.int64)
    rows = len(W) if m_fin else 0
    loads = np.zeros((rows, max(m_fin, 1)), dtype=np.int64)
    mach = np.zeros(g.n, dtype=np.int64) if mach is None else mach
    hosted = np.zeros(1, dtype=np.int64) if hosted is None else hosted
    t, left, used = K.central_loop(
        np.int64(t0), np.int64(state.active_edges), W, g.indptr, g.indices,
        state.status, state.ft, state.active_deg, state.frozen_sum,
        key, lo, width, fixed, cand, np.int64(cand.size), np.int64(m_fin), mach, hosted, loads,
    )
    state.active_edges = int(left)
    return int(t), loads[:used]


def _growth_steps(state: _State) -> int:
    frozen = state.ft[state.status == K.FROZEN]
    return int(frozen.max()) if frozen.size else 0


def central(g: Graph, eps: float) -> tuple[FractionalMatching, VertexCover, int]:
    """Deterministic freezing at ``1 - 2 eps`` from ``x_e = 1/n``.

    The returned count is the number of weight-growth steps taken before the
    last edge froze (0 on an edgeless graph).
    """
    _check_eps(eps, 0.1, "central")
    return central_rand(g, eps, ThresholdSchedule.constant(eps), w0=1.0 / max(g.n, 1))


def central_rand(
    g: Graph,
    eps: float,
    sched: ThresholdSchedule,
    w0: float | None = None,
) -> tuple[FractionalMatching, VertexCover, int]:
    """Freezing against the per-(vertex, iteration) thresholds of ``sched``.

    ``w0`` defaults to ``1/n``; pass ``(1 - 2 eps)/n`` to line up with
    ``mpc_simulation``.
    """
    _check_eps(eps, 0.1, "central_rand")
    if not math.isclose(sched.eps, eps):
        raise ValueError("schedule eps differs from eps")
    n = max(g.n, 1)
    W = weight_table(1.0 / n if w0 is None else w0, eps, n)
    state = _State(g)
    _run_central(g, W, sched, state)
    fm, cover = state.outputs(g, W)
    return fm, cover, _growth_steps(state)


def mpc_simulation(
    g: Graph,
    eps: float,
    seed: int,
    cfg: MpcConfig | None = None,
    knobs: SimulationKnobs | None = None,
    sched: ThresholdSchedule | None = None,
) -> tuple[FractionalMatching, VertexCover, RoundTrace]:
    """Phase-structured MPC simulation of ``central_rand``.

    ``seed`` drives the vertex partitions and, unless ``sched`` is given, the
    thresholds. The trace holds one round per phase and one per finishing
    iteration; ``trace.phase_log`` lists a PhaseRecord per phase.
    """
    _check_eps(eps, 1.0 / 50.0, "mpc_simulation")
    cfg = cfg or MpcConfig()
    knobs = knobs or SimulationKnobs()
    sched = sched or ThresholdSchedule(eps, seed)
    if not math.isclose(sched.eps, eps):
        raise ValueError("schedule eps differs from eps")
    n = g.n
    trace = RoundTrace(n)
    log20_floor = math.log(max(n, 2)) ** 20
    if knobs.d_floor < log20_floor:
        trace.note_substitution(
            f"phase loop exits at d <= {knobs.d_floor:g} instead of log^20 n"
        )
    if knobs.iterations is not None:
        trace.note_substitution(f"{knobs.iterations} iterations per phase instead of log m / (10 log 5)")
    W = weight_table((1.0 - 2.0 * eps) / max(n, 1), eps, max(n, 1))
    state = _State(g)
    if n == 0:
        return (*state.outputs(g, W), trace)

    key, lo, width, fixed = sched._params()
    part_base = stream_key(seed, STREAM_PARTITION)
    cap = len(W) + 1
    ph_stats = np.zeros((cap, 7), dtype=np.int64)
    ph_d = np.zeros((cap, 2))
    mcap = int(math.ceil(math.sqrt(n))) + 1
    ph_loads = np.zeros(cap * (1 if knobs.single_machine else mcap), dtype=np.int64)
    ph_off = np.zeros(cap + 1, dtype=np.int64)
    # edges are sorted by (u, v), so they already form the upper-triangle rows
    up = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(g.edges[:, 0], minlength=n), out=up[1:])
    hi = np.ascontiguousarray(g.edges[:, 1])
    t, left, phases = K.mpc_phases(
        np.int64(n), up, hi, g.indptr, g.indices, W,
        state.status, state.ft, state.active_deg, state.frozen_sum,
        np.int64(state.active_edges), float(n), float(knobs.d_floor), float(eps),
        key, lo, width, fixed, part_base, bool(knobs.single_machine),
        np.int64(knobs.iterations or 0), ph_stats, ph_d, ph_loads, ph_off,
    )
    state.active_edges = int(left)
    d = float(ph_d[phases - 1, 1]) if phases else float(n)

    log: list[PhaseRecord] = []
    for p in range(phases):
        s = ph_stats[p]
        log.append(PhaseRecord(p, int(s[0]), int(s[1]), int(s[2]), float(ph_d[p, 0]),
                               float(ph_d[p, 1]), int(s[3]), int(s[4]), int(s[5]), int(s[6])))
    account_segments(trace, ph_loads, ph_off[: phases + 1], range(phases), cfg, "phase")
    trace.phase_count = int(phases)
    trace.phase_log = log

    # direct finish on ceil(sqrt(d)) machines, one round per iteration
    m_fin = 1 if knobs.single_machine else max(1, int(math.ceil(math.sqrt(d))))
    live = np.flatnonzero(state.status != K.REMOVED)
    part = partition_vertices(live, m_fin, seed, phase=int(phases))
    mach = np.zeros(n, dtype=np.int64)
    mach[live] = part.machine_of
    hosted = part.sizes().astype(np.int64)
    _, loads = _run_central(g, W, sched, state, t0=int(t), m_fin=m_fin, mach=mach, hosted=hosted)
    if len(loads):
        account_rounds(trace, loads, cfg, "central", int(phases))
    fm, cover = state.outputs(g, W)
    return fm, cover, trace


def phase_bound(n: int, eps: float, slack: int = 2) -> int:
    """``ceil(log log2 n / log(1/(1 - gamma))) + slack``, ``gamma = log(1/(1-eps)) / (20 log 5)``."""
    if n < 4:
        return slack
    gamma = -math.log1p(-eps) / (20.0 * math.log(5.0))
    return math.ceil(math.log(math.log2(n)) / -math.log1p(-gamma)) + slack


@dataclass(frozen=True)
class Certificates:
    """Runtime-checkable guarantees of one fractional run."""

    cover_ok: bool
    feasible: bool
    approx_ok: bool
    cover_size: int
    weight: float
    max_y: float
    bound: float
    uncovered: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return self.cover_ok and self.feasible and self.approx_ok

    def as_dict(self) -> dict:
        out = {
            "cover_ok": self.cover_ok,
            "feasible": self.feasible,
            "approx_ok": self.approx_ok,
            "cover_size": self.cover_size,
            "weight": self.weight,
            "max_y": self.max_y,
            "bound": self.bound,
        }
        out.update(self.extra)
        return out


def check_certificates(g: Graph, fm: FractionalMatching, cover: VertexCover, eps: float) -> Certificates:
    """Cover validity, ``y(v) <= 1`` on survivors and ``|C| <= 2(1 + 50 eps) W_M``.

    Comparisons allow an absolute slack of ``1e-9 * n``.
    """
    verdict = verify_vertex_cover(g, cover)
    y = fm.y[fm.alive]
    max_y = float(y.max()) if y.size else 0.0
    w_m = float(y.sum())
    bound = 2.0 * (1.0 + 50.0 * eps) * w_m
    slack = _CERT_TOL * max(g.n, 1)
    return Certificates(
        cover_ok=verdict.ok,
        feasible=max_y <= 1.0 + _CERT_TOL,
        approx_ok=len(cover) <= bound + slack,
        cover_size=len(cover),
        weight=w_m,
        max_y=max_y,
        bound=bound,
        uncovered=verdict.edge,
    )
