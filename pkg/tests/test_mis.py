import math

import numpy as np
import pytest

from mpcgraph.generators import complete, gen_gnp, path, powerlaw, star
from mpcgraph.graph import Graph
from mpcgraph.mis import (
    FINISH_RULE,
    BatchSchedule,
    RankPermutation,
    batch_phase_bound,
    mpc_greedy_mis,
    residual_graph,
    sequential_greedy_mis,
    verify_mis,
)
from mpcgraph.mpc import MpcConfig, SpaceViolation


def order(*vs):
    return RankPermutation.from_order(vs)


def test_sequential_examples():
    assert sequential_greedy_mis(complete(3), order(0, 1, 2)).as_set() == {0}
    p = path(3)  # a=0, b=1, c=2
    assert sequential_greedy_mis(p, order(1, 0, 2)).as_set() == {1}
    assert sequential_greedy_mis(p, order(0, 2, 1)).as_set() == {0, 2}


def test_verify_examples():
    assert verify_mis(complete(3), [0])
    bad = verify_mis(complete(3), [0, 1])
    assert not bad and bad.edge == (0, 1)
    bad = verify_mis(path(3), [0])
    assert not bad and bad.vertex == 2


def test_residual_examples():
    g = gen_gnp(80, 0.1, 3)
    pi = RankPermutation.from_seed(g.n, 3)
    assert residual_graph(g, pi, 0).edge_set() == g.edge_set()
    assert residual_graph(g, pi, g.n).m == 0
    s = star(5)
    assert residual_graph(s, order(0, 1, 2, 3, 4, 5), 1).m == 0
    with pytest.raises(ValueError):
        residual_graph(g, pi, g.n + 1)


def test_permutation_from_seed():
    pi = RankPermutation.from_seed(1000, 4)
    assert pi.is_bijection()
    assert np.array_equal(pi.rank, RankPermutation.from_seed(1000, 4).rank)
    assert np.array_equal(pi.rank[pi.order], np.arange(1000))


def test_mpc_triangle_matches_oracle():
    for seed in range(10):
        got, _ = mpc_greedy_mis(complete(3), seed)
        want = sequential_greedy_mis(complete(3), RankPermutation.from_seed(3, seed))
        assert got.as_set() == want.as_set() and len(got) == 1


def test_mpc_empty_graph():
    got, trace = mpc_greedy_mis(Graph.empty(100), 1)
    assert len(got) == 100 and trace.round_count == 1
    assert FINISH_RULE in trace.substitutions


def test_mpc_gnp_1000(oracle):
    ref = oracle["mis_gnp_1000_005_seed11"]
    g = gen_gnp(1000, 0.05, 11)
    assert g.max_degree == ref["max_degree"]
    got, trace = mpc_greedy_mis(g, 11)
    want = sequential_greedy_mis(g, RankPermutation.from_seed(g.n, 11))
    assert np.array_equal(got.members, want.members)
    assert verify_mis(g, got)
    assert batch_phase_bound(g.max_degree) == ref["batch_bound"]
    assert trace.phase_count <= ref["batch_bound"] + 1
    finish = [r for r in trace.rounds if r.tag == "finish"]
    assert len(finish) == 1 and trace.round_count == trace.phase_count + 1


@pytest.mark.parametrize("slack", [1.0, 2.0, 8.0])
def test_oracle_equivalence_across_budgets(slack):
    cfg = MpcConfig(space_slack=slack)
    for seed, g in enumerate([gen_gnp(400, 0.05, 1), powerlaw(600, 2.2, 2), star(50), path(30)]):
        got, _ = mpc_greedy_mis(g, seed, cfg)
        want = sequential_greedy_mis(g, RankPermutation.from_seed(g.n, seed))
        assert np.array_equal(got.members, want.members)


def test_degree_floor_finishes_early():
    g = gen_gnp(500, 0.05, 1)
    full, t_full = mpc_greedy_mis(g, 1, MpcConfig(space_slack=1.0))
    early, t_early = mpc_greedy_mis(g, 1, MpcConfig(space_slack=1.0), BatchSchedule(degree_floor=10**6))
    assert np.array_equal(full.members, early.members)
    assert t_early.phase_count == 0 < t_full.phase_count


def test_tiny_budget_trips_strict_mode():
    cfg = MpcConfig(space_words=10, space_slack=1.0, strict=True)
    with pytest.raises(SpaceViolation):
        mpc_greedy_mis(gen_gnp(300, 0.2, 1), 1, cfg)


def test_batch_schedule():
    cuts = list(BatchSchedule().cutoffs(1000, 100))
    assert cuts == sorted(set(cuts)) and cuts[-1] == 1000
    assert cuts[0] == math.floor(1000 / 100**0.75)
    assert list(BatchSchedule().cutoffs(5, 1)) == [5]
    with pytest.raises(ValueError):
        BatchSchedule(alpha=1.0)
