"""Simulated MPC execution: vertex partitioning, space accounting, round traces.

The harness tracks simulated state rather than serialized messages: data moves
between machines by reassignment, and whatever a machine receives for a round is
charged to its load for that round. Loads are counted in words:

    load = edges materialized + vertices hosted + broadcast words received

Memory is counted in words, not bits; a word holds one vertex id or one weight,
so word budgets are a factor of about log n below the equivalent bit budgets.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import IO, NamedTuple, Sequence

import numba
import numpy as np

from ._random import STREAM_PARTITION, hash3, hash_key, stream_key, unit_float


class SpaceViolation(RuntimeError):
    """A machine exceeded the per-machine word budget in strict mode."""

    def __init__(self, round_index: int, machine: int, load: int, budget: float):
        super().__init__(
            f"space violation in round {round_index}: machine {machine} holds "
            f"{load} words, budget {budget:g}"
        )
        self.round_index = round_index
        self.machine = machine
        self.load = load
        self.budget = budget


@dataclass(frozen=True)
class MpcConfig:
    """Per-machine space model.

    The enforced budget is ``space_slack * space_words``; ``space_words``
    defaults to the vertex count of the instance, giving the ``S = c * n``
    regime.
    """

    space_words: int | None = None
    space_slack: float = 8.0
    strict: bool = False

    def __post_init__(self):
        if self.space_slack < 1:
            raise ValueError("space_slack must be >= 1")
        if self.space_words is not None and self.space_words < 1:
            raise ValueError("space_words must be positive")

    def budget(self, n: int) -> float:
        words = self.space_words if self.space_words is not None else n
        return self.space_slack * max(words, 1)


class RoundRecord(NamedTuple):
    round: int
    phase: int
    loads: tuple[int, ...]
    max_load: int
    tag: str


@dataclass
class RoundTrace:
    """Ordered ledger of simulated rounds for one run."""

    n: int
    rounds: list[RoundRecord] = field(default_factory=list)
    phase_count: int = 0
    substitutions: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    # optional per-phase summaries (dataclass records) supplied by the algorithm
    phase_log: list = field(default_factory=list)

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    @property
    def max_load(self) -> int:
        return max((r.max_load for r in self.rounds), default=0)

    def note_substitution(self, text: str) -> None:
        if text not in self.substitutions:
            self.substitutions.append(text)

    def extend(self, other: "RoundTrace") -> None:
        """Append ``other``'s rounds after ours, shifting round and phase indices."""
        r0 = len(self.rounds)
        p0 = self.phase_count
        self.rounds.extend(
            rec._replace(round=rec.round + r0, phase=rec.phase + p0) for rec in other.rounds
        )
        self.phase_count += other.phase_count
        for s in other.substitutions:
            self.note_substitution(s)
        self.warnings.extend(other.warnings)
        self.phase_log.extend(other.phase_log)

    def to_json(self, stream: IO[str]) -> None:
        payload = {
            "n": self.n,
            "phase_count": self.phase_count,
            "substitutions": self.substitutions,
            "warnings": self.warnings,
            "rounds": [
                {**r._asdict(), "loads": list(r.loads)} for r in self.rounds
            ],
            "phase_log": [asdict(p) for p in self.phase_log],
        }
        json.dump(payload, stream, indent=1, sort_keys=True)

    def to_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["round", "phase", "machine", "load", "tag"])
        for r in self.rounds:
            for machine, load in enumerate(r.loads):
                writer.writerow([r.round, r.phase, machine, load, r.tag])


def account_round(
    trace: RoundTrace,
    loads: Sequence[int] | np.ndarray,
    cfg: MpcConfig,
    tag: str,
    phase: int | None = None,
) -> RoundTrace:
    """Append one round with the given per-machine loads.

    In strict mode a load above ``cfg.budget(trace.n)`` raises SpaceViolation
    naming the first offending machine; otherwise the overflow is recorded in
    ``trace.warnings`` and the record is kept.
    """
    return account_rounds(trace, np.asarray(loads, dtype=np.int64).reshape(1, -1), cfg, tag, phase)


def account_rounds(
    trace: RoundTrace,
    loads: np.ndarray,
    cfg: MpcConfig,
    tag: str,
    phase: int | None = None,
) -> RoundTrace:
    """Append one round per row of the 2-D ``loads`` array, all in ``phase``."""
    loads = np.asarray(loads, dtype=np.int64)
    if loads.ndim != 2 or loads.shape[1] == 0:
        raise ValueError("a round needs at least one machine")
    if phase is None:
        phase = trace.rounds[-1].phase if trace.rounds else 0
    elif trace.rounds and phase < trace.rounds[-1].phase:
        raise ValueError("phase index must not decrease")
    budget = cfg.budget(trace.n)
    worst = loads.argmax(axis=1)
    peak = loads[np.arange(loads.shape[0]), worst]
    base = len(trace.rounds)
    for row in np.flatnonzero(peak > budget).tolist():
        if cfg.strict:
            # rounds before the offending one are kept
            _append(trace, loads[:row], peak[:row], tag, phase)
            raise SpaceViolation(base + row, int(worst[row]), int(peak[row]), budget)
        trace.warnings.append(
            f"round {base + row}: machine {int(worst[row])} load {int(peak[row])} exceeds budget {budget:g}"
        )
    _append(trace, loads, peak, tag, phase)
    return trace


def account_segments(
    trace: RoundTrace,
    flat: np.ndarray,
    offsets: np.ndarray,
    phases: Sequence[int],
    cfg: MpcConfig,
    tag: str,
) -> RoundTrace:
    """Append rounds whose machine counts differ: round ``i`` holds
    ``flat[offsets[i]:offsets[i + 1]]`` and belongs to ``phases[i]``."""
    flat = np.asarray(flat, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    count = offsets.size - 1
    if count <= 0:
        return trace
    if np.any(np.diff(offsets) <= 0):
        raise ValueError("a round needs at least one machine")
    phases = np.asarray(phases, dtype=np.int64)
    if np.any(np.diff(phases) < 0) or (trace.rounds and phases[0] < trace.rounds[-1].phase):
        raise ValueError("phase index must not decrease")
    peak = np.maximum.reduceat(flat[: offsets[-1]], offsets[:-1])
    budget = cfg.budget(trace.n)
    over = np.flatnonzero(peak > budget).tolist()
    base = len(trace.rounds)
    rows = [flat[offsets[i] : offsets[i + 1]] for i in range(count)]
    for i in over:
        machine = int(np.argmax(rows[i]))
        if cfg.strict:
            _extend(trace, rows[:i], peak[:i], tag, phases[:i])
            raise SpaceViolation(base + i, machine, int(peak[i]), budget)
        trace.warnings.append(
            f"round {base + i}: machine {machine} load {int(peak[i])} exceeds budget {budget:g}"
        )
    _extend(trace, rows, peak, tag, phases)
    return trace


def _append(trace, loads, peak, tag, phase):
    index = len(trace.rounds)
    trace.rounds.extend(
        RoundRecord(index + i, phase, tuple(row), top, tag)
        for i, (row, top) in enumerate(zip(loads.tolist(), peak.tolist()))
    )


def _extend(trace, rows, peak, tag, phases):
    index = len(trace.rounds)
    trace.rounds.extend(
        RoundRecord(index + i, int(p), tuple(row.tolist()), top, tag)
        for i, (row, top, p) in enumerate(zip(rows, peak.tolist(), phases))
    )


@dataclass(frozen=True)
class PartitionAssignment:
    vertices: np.ndarray
    machine_of: np.ndarray
    machines: int

    def sizes(self) -> np.ndarray:
        return np.bincount(self.machine_of, minlength=self.machines)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.vertices.tolist(), self.machine_of.tolist()))


@numba.njit(cache=True, inline="always")
def machine_index(key, v, m):
    """Machine of vertex ``v`` among ``m`` under partition key ``key``."""
    return np.int64(unit_float(hash3(key, v, 0)) * m)


@numba.njit(cache=True)
def _assign(key, vertices, m, out):
    for i in range(vertices.shape[0]):
        out[i] = machine_index(key, vertices[i], m)


def partition_key(seed: int, phase: int = 0) -> np.uint64:
    return hash_key(stream_key(seed, STREAM_PARTITION), phase, 1)


def partition_vertices(vertices, m: int, seed: int, phase: int = 0) -> PartitionAssignment:
    """Assign every vertex independently and uniformly to one of ``m`` machines."""
    if m < 1:
        raise ValueError("machine count must be at least 1")
    verts = np.asarray(vertices, dtype=np.int64).ravel()
    out = np.empty(verts.size, dtype=np.int64)
    _assign(partition_key(seed, phase), verts, m, out)
    return PartitionAssignment(verts, out, m)
