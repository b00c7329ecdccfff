"""Command-line entry point.

Subcommands::

    mis       rank-batched greedy MIS, checked against the sequential greedy
    matching  fractional matching + vertex cover by the MPC simulation
    vcover    same run, writing the cover
    round     integral matching (best of iterated rounding and filtering)
    bench     phase counts over a geometric grid of n
    verify    check a matching / independent set / cover file against a graph

Exit status: 0 when every certificate passes, 1 when one fails, 2 on usage
errors. Reports are JSON with sorted keys; apart from ``wall_time`` they are
identical for identical command lines.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .generators import from_spec, gen_gnp, powerlaw
from .graph import EdgeListError, Graph, read_edge_list
from .matching import SimulationKnobs, check_certificates, mpc_simulation, phase_bound, verify_vertex_cover
from .mis import RankPermutation, batch_phase_bound, mpc_greedy_mis, sequential_greedy_mis, verify_mis
from .mpc import MpcConfig, RoundTrace, SpaceViolation
from .rounding import Matching, best_of, iterated_matching, verify_matching

EXIT_OK, EXIT_CERT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    algorithm: str
    input: str
    seed: int
    eps: float | None = None
    rounds: int = 0
    phases: int = 0
    max_load: int = 0
    sizes: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.certificates.values())

    def to_json(self) -> str:
        payload = {
            "algorithm": self.algorithm,
            "input": self.input,
            "seed": self.seed,
            "eps": self.eps,
            "rounds": self.rounds,
            "phases": self.phases,
            "max_load": self.max_load,
            "sizes": self.sizes,
            "certificates": self.certificates,
            "details": self.details,
            "passed": self.passed,
            "wall_time": self.wall_time,
        }
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def _parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    src = shared.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="PATH", help="edge-list file")
    src.add_argument("--gen", metavar="SPEC", help="generator spec, e.g. gnp:1000,0.01")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--eps", type=float, default=None)
    shared.add_argument("--space-slack", type=float, default=8.0)
    shared.add_argument("--strict-space", action="store_true")
    shared.add_argument("--d-floor", type=float, default=64.0)
    shared.add_argument("--single-machine", action="store_true")
    shared.add_argument("--iterations", type=int, default=None, help="fixed iterations per phase")
    shared.add_argument("--out", metavar="PATH", help="report file (default: stdout)")
    shared.add_argument("--trace", metavar="PATH", help="round trace file")
    shared.add_argument("--format", choices=("json", "csv"), default="json", help="trace format")

    p = argparse.ArgumentParser(prog="mpcgraph", description="Simulated MPC graph algorithms.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("mis", parents=[shared], help="greedy MIS by rank batching")
    m = sub.add_parser("matching", parents=[shared], help="fractional matching / vertex cover")
    m.add_argument("--save", metavar="PATH", help="write x as CSV (u, v, x_e, freeze iterations)")
    c = sub.add_parser("vcover", parents=[shared], help="vertex cover from the fractional run")
    c.add_argument("--save", metavar="PATH", help="write cover members with provenance")
    r = sub.add_parser("round", parents=[shared], help="integral matching")
    r.add_argument("--save", metavar="PATH", help="write matched edges")
    b = sub.add_parser("bench", parents=[shared], help="phase counts over growing n")
    b.add_argument("--algo", choices=("mis", "matching"), default="mis")
    b.add_argument("--family", default="gnp-logn",
                   help="gnp-logn (p = 8 ln n / n), gnp-avg:D, gnp:P or powerlaw:EXP")
    b.add_argument("--n-min", type=int, default=1 << 10)
    b.add_argument("--n-max", type=int, default=1 << 14)
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--csv", metavar="PATH", help="per-(n, seed) rows (default: stdout)")
    v = sub.add_parser("verify", parents=[shared], help="validate an output file")
    what = v.add_mutually_exclusive_group(required=True)
    what.add_argument("--matching", metavar="PATH")
    what.add_argument("--mis", metavar="PATH")
    what.add_argument("--cover", metavar="PATH")
    return p


def _load(args) -> tuple[Graph, str, np.ndarray | None, dict | None]:
    """Graph, input descriptor, dense->original labels, original->dense map."""
    if args.input:
        try:
            g, remap = read_edge_list(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
        labels = np.array(sorted(remap, key=remap.get), dtype=np.int64)
        return g, f"file:{args.input}", labels, remap
    if args.gen:
        try:
            return from_spec(args.gen, args.seed), f"gen:{args.gen}", None, None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("one of --input or --gen is required")


def _cfg(args) -> MpcConfig:
    try:
        return MpcConfig(space_slack=args.space_slack, strict=args.strict_space)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _knobs(args) -> SimulationKnobs:
    try:
        return SimulationKnobs(d_floor=args.d_floor, single_machine=args.single_machine, iterations=args.iterations)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _label(labels, ids):
    ids = np.asarray(ids, dtype=np.int64)
    return ids if labels is None else labels[ids]


def _write_trace(args, trace: RoundTrace) -> None:
    if not args.trace:
        return
    with open(args.trace, "w", encoding="utf-8", newline="") as fh:
        (trace.to_csv if args.format == "csv" else trace.to_json)(fh)


def _fill_trace(report: RunReport, trace: RoundTrace) -> None:
    report.rounds = trace.round_count
    report.phases = trace.phase_count
    report.max_load = trace.max_load
    if trace.substitutions:
        report.details["substitutions"] = list(trace.substitutions)
    if trace.warnings:
        report.details["space_warnings"] = len(trace.warnings)


def cmd_mis(args, g, desc, labels, _remap) -> RunReport:
    cfg = _cfg(args)
    report = RunReport("mis", desc, args.seed)
    try:
        mis, trace = mpc_greedy_mis(g, args.seed, cfg)
    except SpaceViolation as exc:
        report.certificates["space"] = False
        report.details["space_violation"] = str(exc)
        return report
    ref = sequential_greedy_mis(g, RankPermutation.from_seed(g.n, args.seed))
    bound = batch_phase_bound(g.max_degree) + 2
    report.sizes["mis"] = len(mis)
    report.certificates["verify_mis"] = bool(verify_mis(g, mis.members))
    report.certificates["oracle_equal"] = bool(np.array_equal(mis.members, ref.members))
    report.certificates["phase_bound"] = trace.phase_count <= bound
    if cfg.strict:
        report.certificates["space"] = True
    report.details["phase_limit"] = bound
    _fill_trace(report, trace)
    _write_trace(args, trace)
    if args.out is None:
        report.details["members"] = _label(labels, mis.members).tolist()
    return report


def _fractional(args, g, desc, name):
    eps = 0.02 if args.eps is None else args.eps
    cfg = _cfg(args)
    report = RunReport(name, desc, args.seed, eps)
    try:
        fm, cover, trace = mpc_simulation(g, eps, args.seed, cfg, _knobs(args))
    except SpaceViolation as exc:
        report.certificates["space"] = False
        report.details["space_violation"] = str(exc)
        return report, None, None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cert = check_certificates(g, fm, cover, eps)
    limit = phase_bound(g.n, eps)
    report.sizes.update(cover=len(cover), weight=cert.weight, removed=int((~fm.alive).sum()))
    report.certificates.update(
        cover=cert.cover_ok, feasible=cert.feasible, approximation=cert.approx_ok,
        phase_bound=trace.phase_count <= limit,
    )
    if cfg.strict:
        report.certificates["space"] = True
    report.details.update(max_y=cert.max_y, cover_bound=cert.bound, phase_limit=limit)
    _fill_trace(report, trace)
    _write_trace(args, trace)
    return report, fm, cover


def cmd_matching(args, g, desc, labels, _remap) -> RunReport:
    report, fm, _ = _fractional(args, g, desc, "matching")
    if fm is not None and args.save:
        with open(args.save, "w", encoding="utf-8", newline="") as fh:
            if labels is None:
                fm.to_csv(fh)
            else:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["u", "v", "x_e", "frozen_iteration_u", "frozen_iteration_v"])
                for (a, b), x in zip(g.edges.tolist(), fm.x.tolist()):
                    w.writerow([labels[a], labels[b], repr(x), fm.freeze_time[a], fm.freeze_time[b]])
    return report


def cmd_vcover(args, g, desc, labels, _remap) -> RunReport:
    report, _, cover = _fractional(args, g, desc, "vcover")
    if cover is not None and args.save:
        with open(args.save, "w", encoding="utf-8") as fh:
            for v, tag in zip(_label(labels, cover.members).tolist(), cover.provenance):
                fh.write(f"{v} {tag}\n")
    return report


def cmd_round(args, g, desc, labels, _remap) -> RunReport:
    eps = 0.1 if args.eps is None else args.eps
    cfg = _cfg(args)
    report = RunReport("round", desc, args.seed, eps)
    try:
        it, trace = iterated_matching(g, eps, args.seed, cfg, _knobs(args))
        best = best_of(g, eps, args.seed, cfg, _knobs(args))
    except SpaceViolation as exc:
        report.certificates["space"] = False
        report.details["space_violation"] = str(exc)
        return report
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report.sizes.update(matching=len(best), iterated=len(it))
    report.certificates["valid_matching"] = bool(verify_matching(g, best))
    if cfg.strict:
        report.certificates["space"] = True
    _fill_trace(report, trace)
    _write_trace(args, trace)
    if args.save:
        with open(args.save, "w", encoding="utf-8") as fh:
            Matching(_label(labels, best.edges).reshape(-1, 2)).write(fh)
    return report


def _family(spec: str, n: int, seed: int) -> Graph:
    kind, _, arg = spec.partition(":")
    if kind == "gnp-logn":
        return gen_gnp(n, min(1.0, 8.0 * math.log(n) / n), seed)
    if kind == "gnp-avg":
        return gen_gnp(n, min(1.0, float(arg) / n), seed)
    if kind == "gnp":
        return gen_gnp(n, float(arg), seed)
    if kind == "powerlaw":
        return powerlaw(n, float(arg), seed)
    raise UsageError(f"unknown bench family {spec!r}")


def bench_check(rows: list[dict]) -> dict:
    """Median phases per n must not decrease and must grow less than 2x per step."""
    by_n: dict[int, list[int]] = {}
    for r in rows:
        by_n.setdefault(r["n"], []).append(r["phases"])
    ns = sorted(by_n)
    med = [float(np.median(by_n[n])) for n in ns]
    steps = list(zip(med, med[1:]))
    return {
        "median_phases": dict(zip(map(str, ns), med)),
        "non_decreasing": all(b >= a for a, b in steps),
        "sub_doubling": all(b < 2 * max(a, 1.0) for a, b in steps),
    }


def cmd_bench(args, *_ignored) -> RunReport:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    cfg = _cfg(args)
    eps = 0.02 if args.eps is None else args.eps
    report = RunReport(f"bench-{args.algo}", f"family:{args.family}", args.seed,
                       eps if args.algo == "matching" else None)
    rows = []
    n = args.n_min
    while n <= args.n_max:
        for k in range(args.seeds):
            seed = args.seed + k
            g = _family(args.family, n, seed)
            if args.algo == "mis":
                _, trace = mpc_greedy_mis(g, seed, cfg)
            else:
                _, _, trace = mpc_simulation(g, eps, seed, cfg, _knobs(args))
            rows.append({"n": n, "seed": seed, "m": g.m, "phases": trace.phase_count,
                         "rounds": trace.round_count, "max_load": trace.max_load})
        n *= 4
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=["n", "seed", "m", "phases", "rounds", "max_load"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(out.getvalue())
    elif args.out:
        sys.stdout.write(out.getvalue())
    check = bench_check(rows)
    report.certificates.update(non_decreasing=check["non_decreasing"], sub_doubling=check["sub_doubling"])
    report.details["median_phases"] = check["median_phases"]
    report.rounds = sum(r["rounds"] for r in rows)
    report.phases = max((r["phases"] for r in rows), default=0)
    report.max_load = max((r["max_load"] for r in rows), default=0)
    return report


def _read_ids(path: str, per_line: int) -> list[list[int]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()[:per_line]
            try:
                out.append([int(p) for p in parts])
            except ValueError:
                raise UsageError(f"{path}: line {lineno}: expected integers") from None
            if len(parts) != per_line:
                raise UsageError(f"{path}: line {lineno}: expected {per_line} ids")
    return out


def cmd_verify(args, g, desc, labels, remap) -> RunReport:
    report = RunReport("verify", desc, args.seed)
    to_dense = (lambda v: remap.get(v)) if remap is not None else (lambda v: v if 0 <= v < g.n else None)
    try:
        if args.matching:
            pairs = _read_ids(args.matching, 2)
            dense = [(to_dense(a), to_dense(b)) for a, b in pairs]
            known = all(a is not None and b is not None for a, b in dense)
            ok = known and bool(verify_matching(g, Matching.from_pairs(dense)))
            report.sizes["matching"] = len(pairs)
            report.certificates["valid_matching"] = ok
        elif args.mis:
            ids = [to_dense(r[0]) for r in _read_ids(args.mis, 1)]
            ok = all(v is not None for v in ids) and bool(verify_mis(g, np.array(ids, dtype=np.int64)))
            report.sizes["mis"] = len(ids)
            report.certificates["verify_mis"] = ok
        else:
            ids = [to_dense(r[0]) for r in _read_ids(args.cover, 1)]
            ok = all(v is not None for v in ids) and bool(verify_vertex_cover(g, ids))
            report.sizes["cover"] = len(ids)
            report.certificates["cover"] = ok
    except OSError as exc:
        raise UsageError(str(exc)) from None
    return report


COMMANDS = {
    "mis": cmd_mis,
    "matching": cmd_matching,
    "vcover": cmd_vcover,
    "round": cmd_round,
    "bench": cmd_bench,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    start = time.perf_counter()
    try:
        if args.command == "bench":
            report = cmd_bench(args)
        else:
            g, desc, labels, remap = _load(args)
            report = COMMANDS[args.command](args, g, desc, labels, remap)
    except (UsageError, EdgeListError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mpcgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_time = round(time.perf_counter() - start, 6)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.passed:
        failed = sorted(k for k, v in report.certificates.items() if not v)
        print(f"mpcgraph: certificate failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
