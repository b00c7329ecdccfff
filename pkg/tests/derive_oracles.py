"""Recompute the frozen reference values in ``data/oracles.json``.

Every value here comes from exact arithmetic (fractions / mpmath), exhaustive
enumeration, or an independent library (networkx blossom matching), never from
the package's own algorithms. Graph instances are produced by the package's
generators, since those are the inputs under test.

    python tests/derive_oracles.py
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import networkx as nx

from mpcgraph.generators import complete, gen_gnp, petersen, star

OUT = Path(__file__).with_name("data") / "oracles.json"


def nx_graph(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges.tolist())
    return h


def max_matching(g) -> int:
    return len(nx.max_weight_matching(nx_graph(g), maxcardinality=True))


def proposal_edge_probability() -> Fraction:
    # single edge uv, x = 1: each endpoint proposes to the other w.p. 1/10
    p = Fraction(1, 10)
    total = Fraction(0)
    for xu, xv in itertools.product((True, False), repeat=2):
        weight = (p if xu else 1 - p) * (p if xv else 1 - p)
        if xu or xv:  # H = {uv}, deduplicated, always good
            total += weight
    return total


def star_probability(leaves: int, x: Fraction) -> Fraction:
    # only the center proposes; any proposal is a good edge
    return sum((x / 10 for _ in range(leaves)), Fraction(0))


def central_single_edge(eps: Fraction):
    # both endpoints have y = x; x starts at 1/n = 1/2 and grows by 1/(1-eps)
    x, t = Fraction(1, 2), 0
    while x < 1 - 2 * eps:
        x /= 1 - eps
        t += 1
    return t, x


def main() -> None:
    mpmath.mp.dps = 50
    out: dict = {}

    n, p = 1000, mpmath.mpf("0.01")
    pairs = n * (n - 1) // 2
    out["gnp_1000_001"] = {"mean": float(pairs * p), "sigma": float(mpmath.sqrt(pairs * p * (1 - p)))}
    out["partition_10000_4"] = {"mean": 2500.0, "sigma": float(mpmath.sqrt(10000 * mpmath.mpf(3) / 16))}

    t, x = central_single_edge(Fraction(1, 10))
    out["central_single_edge"] = {"steps": t, "x": float(x)}

    out["rounding_single_edge_p"] = float(proposal_edge_probability())
    out["rounding_star5_p"] = float(star_probability(5, Fraction(1, 5)))

    out["iteration_budget_eps01"] = int(mpmath.ceil(mpmath.log(10) / mpmath.log(mpmath.mpf(150) / 149)))

    eps = mpmath.mpf("0.02")
    gamma = mpmath.log(1 / (1 - eps)) / (20 * mpmath.log(5))
    out["phase_bound_5000_002"] = int(mpmath.ceil(mpmath.log(mpmath.log(5000, 2)) / mpmath.log(1 / (1 - gamma))))

    g = gen_gnp(1000, 0.05, 11)
    delta = int(g.degrees.max())
    out["mis_gnp_1000_005_seed11"] = {
        "max_degree": delta,
        "batch_bound": int(mpmath.ceil(mpmath.log(mpmath.log(delta, 2)) / mpmath.log(mpmath.mpf(4) / 3))),
    }

    out["exact"] = {
        "K4": max_matching(complete(4)),
        "star7": max_matching(star(7)),
        "petersen": max_matching(petersen()),
        "gnp_300_005_seed2": max_matching(gen_gnp(300, 0.05, 2)),
    }
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()
