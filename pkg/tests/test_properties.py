"""Randomized invariants over small arbitrary graphs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mpcgraph.graph import Graph, check_graph
from mpcgraph.matching import (
    SimulationKnobs,
    ThresholdSchedule,
    central,
    central_rand,
    check_certificates,
    mpc_simulation,
)
from mpcgraph.mis import RankPermutation, mpc_greedy_mis, sequential_greedy_mis, verify_mis
from mpcgraph.mpc import MpcConfig, partition_vertices
from mpcgraph.oracles import exact_max_matching, greedy_maximal_matching
from mpcgraph.rounding import round_matching, small_matching_fallback, verify_matching

seeds = st.integers(0, 2**32 - 1)


@st.composite
def graphs(draw, max_n=24):
    n = draw(st.integers(0, max_n))
    if n < 2:
        return Graph.empty(n)
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    return Graph.from_edges(n, draw(st.lists(pairs, max_size=4 * n)))


def is_maximal(g, m):
    used = np.zeros(g.n, dtype=bool)
    used[m.vertices()] = True
    return g.m == 0 or not np.any(~used[g.edges[:, 0]] & ~used[g.edges[:, 1]])


@given(graphs(40))
def test_graph_invariants(g):
    assert check_graph(g)


@given(graphs(40), seeds, st.sampled_from([1.0, 1.5, 8.0]))
def test_mis_oracle_equivalence(g, seed, slack):
    got, trace = mpc_greedy_mis(g, seed, MpcConfig(space_slack=slack))
    want = sequential_greedy_mis(g, RankPermutation.from_seed(g.n, seed))
    assert np.array_equal(got.members, want.members)
    assert verify_mis(g, got)
    rounds = [r.round for r in trace.rounds]
    assert rounds == list(range(len(rounds)))


@given(graphs(), st.floats(0.01, 0.1))
def test_central_outputs(g, eps):
    fm, cover, _ = central(g, eps)
    cert = check_certificates(g, fm, cover, eps)
    assert cert.cover_ok and cert.feasible


@settings(max_examples=60, deadline=None)
@given(graphs(40), seeds, st.floats(0.005, 0.02), st.sampled_from([1.0, 2.0, 4.0]), st.sampled_from([None, 2, 5]))
def test_mpc_certificates(g, seed, eps, d_floor, iterations):
    knobs = SimulationKnobs(d_floor=d_floor, iterations=iterations)
    fm, cover, trace = mpc_simulation(g, eps, seed, knobs=knobs)
    cert = check_certificates(g, fm, cover, eps)
    assert cert.cover_ok and cert.feasible
    assert np.all(fm.x >= 0)
    phases = [r.phase for r in trace.rounds]
    assert phases == sorted(phases)


@settings(max_examples=60, deadline=None)
@given(graphs(40), seeds, st.sampled_from([None, 3]))
def test_single_machine_collapse(g, seed, iterations):
    eps = 0.02
    sched = ThresholdSchedule(eps, seed)
    knobs = SimulationKnobs(d_floor=1, single_machine=True, iterations=iterations)
    fm, _, _ = mpc_simulation(g, eps, seed, knobs=knobs, sched=sched)
    ref, _, _ = central_rand(g, eps, sched, w0=(1 - 2 * eps) / max(g.n, 1))
    assert np.array_equal(fm.freeze_time, ref.freeze_time)
    assert np.allclose(fm.x, ref.x, rtol=0, atol=1e-12)


@given(graphs(), seeds)
def test_rounding_gives_matching(g, seed):
    fm, cover, _ = central(g, 0.1)
    m = round_matching(g, fm, cover.members, seed)
    assert verify_matching(g, m)


@given(graphs(), seeds)
def test_matching_sandwich(g, seed):
    best = exact_max_matching(g)
    assert verify_matching(g, best.witness) and len(best.witness) == best.value
    order = np.random.default_rng(seed).permutation(g.m)
    greedy = greedy_maximal_matching(g, order)
    assert best.value >= len(greedy) >= best.value / 2


@given(graphs(40), seeds, st.sampled_from([1.0, 2.0]))
def test_fallback_is_maximal(g, seed, slack):
    m = small_matching_fallback(g, MpcConfig(space_slack=slack), seed)
    assert verify_matching(g, m) and is_maximal(g, m)


@given(st.lists(st.integers(0, 10**6), unique=True, max_size=200), st.integers(1, 50), seeds)
def test_partition_range(vertices, m, seed):
    part = partition_vertices(vertices, m, seed)
    assert part.vertices.tolist() == vertices
    assert np.all((part.machine_of >= 0) & (part.machine_of < m))
    assert part.sizes().sum() == len(vertices)
