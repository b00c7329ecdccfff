"""Slow, literal re-statement of the phase simulation used as a cross-check.

Keeps an explicit weight per edge and loops machine by machine. Shares only the
threshold schedule, the partition function and the weight table with the
package, so that both sides see the same random draws.
"""

import math

import numpy as np

from mpcgraph.matching import ThresholdSchedule, weight_table
from mpcgraph.mpc import partition_vertices


def reference_simulation(g, eps, seed, d_floor, iterations=None, sched=None):
    sched = sched or ThresholdSchedule(eps, seed)
    n = g.n
    W = weight_table((1 - 2 * eps) / n, eps, n)
    edges = [tuple(e) for e in g.edges.tolist()]
    nbrs = {v: [] for v in range(n)}
    for i, (a, b) in enumerate(edges):
        nbrs[a].append((b, i))
        nbrs[b].append((a, i))
    alive = [True] * n
    ft = [None] * n  # freeze iteration, None while active
    x = [W[0]] * len(edges)
    t = 0
    d = float(n)
    phase = 0

    def active(v):
        return alive[v] and ft[v] is None

    def live_edges():
        return [i for i, (a, b) in enumerate(edges) if active(a) and active(b)]

    def y(v):
        return sum(x[i] for u, i in nbrs[v] if alive[u])

    while d > d_floor and live_edges():
        y_old = [sum(x[i] for u, i in nbrs[v] if alive[u] and not (active(u) and active(v))) for v in range(n)]
        m = max(1, math.ceil(math.sqrt(d)))
        it = iterations or max(1, math.floor(math.log(m) / (10 * math.log(5))))
        verts = [v for v in range(n) if alive[v]]
        mach = dict(zip(verts, partition_vertices(verts, m, seed, phase).machine_of.tolist()))
        # local graph: edges active at phase start with both ends on one machine
        local = {v: [] for v in verts}
        for i in live_edges():
            a, b = edges[i]
            if mach[a] == mach[b]:
                local[a].append(i)
                local[b].append(i)
        ran = 0
        for _ in range(it):
            if not live_edges():
                break
            ran += 1
            w = W[t]
            marks = []
            for machine in range(m):
                for v in verts:
                    if mach[v] != machine or not active(v):
                        continue
                    # active local edges carry the current weight, frozen ones keep theirs
                    s = 0.0
                    for i in local[v]:
                        a, b = edges[i]
                        s += w if active(a) and active(b) else x[i]
                    if m * s + y_old[v] >= sched.T(v, t):
                        marks.append(v)
            for v in marks:
                for u, i in nbrs[v]:
                    if active(u) or u in marks:
                        x[i] = w
            for v in marks:
                ft[v] = t
            t += 1
            for i in live_edges():
                x[i] = W[t]
        d *= (1 - eps) ** ran
        heavy = [v for v in verts if y(v) > 1.0]
        for v in heavy:
            alive[v] = False
        for i, (a, b) in enumerate(edges):
            if not (alive[a] and alive[b]):
                x[i] = 0.0
        marks = [v for v in range(n) if active(v) and y(v) > 1 - 2 * eps]
        for v in marks:
            ft[v] = t
        if marks and not live_edges():
            # iteration t ends the run; its threshold test still applies
            for v in range(n):
                if active(v) and y(v) >= sched.T(v, t):
                    ft[v] = t
        phase += 1

    while live_edges():
        marks = [v for v in range(n) if active(v) and y(v) >= sched.T(v, t)]
        for v in marks:
            ft[v] = t
        t += 1
        for i in live_edges():
            x[i] = W[t]
    x = np.array([xi if alive[a] and alive[b] else 0.0 for xi, (a, b) in zip(x, edges)])
    cover = sorted(v for v in range(n) if not alive[v] or ft[v] is not None)
    freeze = np.array([-1 if f is None else f for f in ft])
    return x, cover, freeze, phase
