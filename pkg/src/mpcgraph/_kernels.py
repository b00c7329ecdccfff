"""Compiled inner loops for the freezing process.

Edge weights are never stored during a run. Every active edge carries the
common weight ``W[t]`` of the current iteration and a frozen edge keeps the
weight of the iteration in which its first endpoint froze, so an edge's weight
is ``W[min(freeze time of u, freeze time of v)]`` with "still active" meaning
"now". Per vertex we keep the number of active incident edges and the summed
weight of frozen incident edges, which gives ``y_v`` in O(1).

Vertex status codes: ACTIVE, FROZEN, REMOVED (heavy vertices dropped from the
working set), MARKED (frozen in the iteration being resolved).
"""

import math

import numba
import numpy as np

from ._random import hash3, unit_float
from .mpc import machine_index

ACTIVE = 0
FROZEN = 1
REMOVED = 2
MARKED = 3


@numba.njit(cache=True, inline="always")
def threshold(key, lo, width, fixed, v, t):
    if fixed >= 0.0:
        return fixed
    return lo + width * unit_float(hash3(key, v, t))


@numba.njit(cache=True)
def thresholds_at(key, lo, width, fixed, vs, t, out):
    for i in range(vs.shape[0]):
        out[i] = threshold(key, lo, width, fixed, vs[i], t)


@numba.njit(cache=True)
def freeze_marked(marks, nm, t, W, indptr, indices, status, ft, active_deg, frozen_sum):
    """Freeze the MARKED vertices at iteration ``t``; return #edges frozen."""
    w = W[t]
    frozen = 0
    for i in range(nm):
        v = marks[i]
        for s in range(indptr[v], indptr[v + 1]):
            u = indices[s]
            su = status[u]
            if su == ACTIVE:
                frozen_sum[u] += w
                active_deg[u] -= 1
                frozen_sum[v] += w
                active_deg[v] -= 1
                frozen += 1
            elif su == MARKED:
                frozen_sum[v] += w
                active_deg[v] -= 1
                if v < u:
                    frozen += 1
    for i in range(nm):
        v = marks[i]
        status[v] = FROZEN
        ft[v] = t
    return frozen


@numba.njit(cache=True)
def central_loop(
    t, active_edges, W, indptr, indices, status, ft, active_deg, frozen_sum,
    key, lo, width, fixed, cand, ncand, m_fin, mach, hosted, loads_out,
):
    """Sequential iterations until no edge is active.

    ``cand`` lists the vertices that may still freeze, in increasing order.
    With ``m_fin > 0`` the per-machine load of every iteration is written to
    ``loads_out[row]`` (vertex-centric storage: a machine holds its vertices
    and their active edges). Returns (t, active_edges, rows written).
    """
    floor = fixed if fixed >= 0.0 else lo
    marks = np.empty(max(ncand, 1), dtype=np.int64)
    row = 0
    while active_edges > 0:
        w = W[t]
        nm = 0
        k = 0
        for i in range(ncand):
            v = cand[i]
            if status[v] != ACTIVE:
                continue
            y = frozen_sum[v] + active_deg[v] * w
            if active_deg[v] == 0 and y < floor:
                # no active edge left and below every possible threshold
                continue
            cand[k] = v
            k += 1
            if y >= floor and y >= threshold(key, lo, width, fixed, v, t):
                status[v] = MARKED
                marks[nm] = v
                nm += 1
        ncand = k
        if m_fin > 0:
            for j in range(m_fin):
                loads_out[row, j] = hosted[j]
            for i in range(ncand):
                v = cand[i]
                loads_out[row, mach[v]] += active_deg[v]
            row += 1
        active_edges -= freeze_marked(marks, nm, t, W, indptr, indices, status, ft, active_deg, frozen_sum)
        t += 1
    return t, active_edges, row


@numba.njit(cache=True)
def _build_local(n, up, hi, key, lptr, fill, ladj):
    # adjacency of the machine-local active graphs
    for v in range(n + 1):
        lptr[v] = 0
    for a in range(n):
        ka = key[a]
        if ka < 0:
            continue
        for j in range(up[a], up[a + 1]):
            b = hi[j]
            if key[b] == ka:
                lptr[a + 1] += 1
                lptr[b + 1] += 1
    for v in range(n):
        lptr[v + 1] += lptr[v]
        fill[v] = lptr[v]
    for a in range(n):
        ka = key[a]
        if ka < 0:
            continue
        for j in range(up[a], up[a + 1]):
            b = hi[j]
            if key[b] == ka:
                ladj[fill[a]] = b
                fill[a] += 1
                ladj[fill[b]] = a
                fill[b] += 1


@numba.njit(cache=True)
def mpc_phases(
    n, up, hi, indptr, indices, W, status, ft, active_deg, frozen_sum,
    active_edges, d, d_floor, eps, key, lo, width, fixed, part_base, single,
    it_force, ph_stats, ph_d, ph_loads, ph_load_off,
):
    """Phase loop of the MPC simulation.

    ``up, hi`` is the upper-triangle adjacency (row ``a`` lists the neighbors
    ``b > a``). ``it_force > 0`` overrides the per-phase iteration count.
    Per phase, ``ph_stats`` gets (m, I, t at phase start, max
    active degree at phase start, local edges, heavy removals, step-j
    freezes) and ``ph_d`` gets (d at start, d after the update). Machine
    loads are appended to ``ph_loads`` with offsets in ``ph_load_off``.

    Returns (t, active_edges, phases).
    """
    t = 0
    phase = 0
    y_old = np.zeros(n)
    # machine of each active vertex, -1 otherwise: one comparison then tells
    # whether an edge is active and local
    mkey = np.full(n, -1, dtype=np.int32)
    l_act = np.zeros(n, dtype=np.int64)
    l_frz = np.zeros(n)
    lptr = np.zeros(n + 1, dtype=np.int64)
    fill = np.zeros(n, dtype=np.int64)
    ladj = np.empty(2 * hi.shape[0], dtype=np.int64)
    marks = np.empty(max(n, 1), dtype=np.int64)
    heavy = np.empty(max(n, 1), dtype=np.int64)
    hmark = np.zeros(n, dtype=np.bool_)
    floor = fixed if fixed >= 0.0 else lo
    log5 = math.log(5.0)
    off = 0

    while d > d_floor and active_edges > 0:
        # (a) G' is implicit: an edge is in G' iff both endpoints are active
        maxdeg = 0
        for v in range(n):
            if status[v] == ACTIVE and active_deg[v] > maxdeg:
                maxdeg = active_deg[v]

        # (b) weight of edges frozen in earlier phases
        for v in range(n):
            y_old[v] = frozen_sum[v]

        # (c) machines and iterations
        m_nom = max(1, int(math.ceil(math.sqrt(d))))
        m = 1 if single else m_nom
        if it_force > 0:
            it = it_force
        else:
            it = max(1, int(math.floor(math.log(m_nom) / (10.0 * log5))))

        # (d) random partition of V'; hosted vertices count toward the load
        pkey = hash3(part_base, phase, 1)
        for j in range(m):
            ph_loads[off + j] = 0
        for v in range(n):
            l_act[v] = 0
            l_frz[v] = 0.0
            mkey[v] = -1
            if status[v] != REMOVED:
                mv = 0 if m == 1 else machine_index(pkey, v, m)
                ph_loads[off + mv] += 1
                if status[v] == ACTIVE:
                    mkey[v] = mv

        # each machine collects G'[V_i]
        n_local = 0
        for a in range(n):
            ka = mkey[a]
            if ka < 0:
                continue
            c = 0
            for j in range(up[a], up[a + 1]):
                b = hi[j]
                if mkey[b] == ka:
                    l_act[b] += 1
                    c += 1
            l_act[a] += c
            ph_loads[off + ka] += c
            n_local += c
        have_local = False

        ph_stats[phase, 0] = m
        ph_stats[phase, 2] = t
        ph_stats[phase, 3] = maxdeg
        ph_stats[phase, 4] = n_local
        ph_d[phase, 0] = d
        ph_load_off[phase] = off
        off += m

        # (e) I iterations per machine; estimates see local edges only. The
        # process ends once no edge is active, as in the sequential version.
        ran = 0
        for s in range(it):
            if active_edges == 0:
                break
            ran += 1
            w = W[t]
            nm = 0
            for v in range(n):
                if status[v] != ACTIVE:
                    continue
                est = m * (l_act[v] * w + l_frz[v]) + y_old[v]
                if est >= floor and est >= threshold(key, lo, width, fixed, v, t):
                    status[v] = MARKED
                    marks[nm] = v
                    nm += 1
            if nm > 0 and s + 1 < it:
                if not have_local:
                    _build_local(n, up, hi, mkey, lptr, fill, ladj)
                    have_local = True
                for i in range(nm):
                    v = marks[i]
                    for q in range(lptr[v], lptr[v + 1]):
                        u = ladj[q]
                        if status[u] == ACTIVE:
                            l_act[u] -= 1
                            l_frz[u] += w
            if nm > 0:
                active_edges -= freeze_marked(marks, nm, t, W, indptr, indices, status, ft, active_deg, frozen_sum)
            t += 1

        # (f) degree bound
        ph_stats[phase, 1] = ran
        d = d * (1.0 - eps) ** ran
        ph_d[phase, 1] = d

        # (g)-(i) reconciled weights; heavy vertices leave V' with their edges
        w = W[t]
        nh = 0
        for v in range(n):
            if status[v] != REMOVED and frozen_sum[v] + active_deg[v] * w > 1.0:
                heavy[nh] = v
                hmark[v] = True
                nh += 1
        for i in range(nh):
            v = heavy[i]
            sv = status[v]
            tv = ft[v] if sv == FROZEN else t
            for q in range(indptr[v], indptr[v + 1]):
                u = indices[q]
                su = status[u]
                if su == REMOVED:
                    continue
                live = sv == ACTIVE and su == ACTIVE
                if hmark[u]:
                    if live and v < u:
                        active_edges -= 1
                    continue
                if live:
                    active_deg[u] -= 1
                    active_edges -= 1
                else:
                    tu = ft[u] if su == FROZEN else t
                    frozen_sum[u] -= W[min(tv, tu)]
        for i in range(nh):
            status[heavy[i]] = REMOVED
            hmark[heavy[i]] = False

        # (j) freeze everything already above 1 - 2 eps
        nm = 0
        for v in range(n):
            if status[v] == ACTIVE and frozen_sum[v] + active_deg[v] * w > 1.0 - 2.0 * eps:
                status[v] = MARKED
                marks[nm] = v
                nm += 1
        if nm > 0:
            active_edges -= freeze_marked(marks, nm, t, W, indptr, indices, status, ft, active_deg, frozen_sum)
            if active_edges == 0:
                # these freezes belong to iteration t, which no later phase
                # will run: finish its threshold test here
                k = 0
                for v in range(n):
                    if status[v] == ACTIVE:
                        y = frozen_sum[v]
                        if y >= floor and y >= threshold(key, lo, width, fixed, v, t):
                            status[v] = MARKED
                            marks[k] = v
                            k += 1
                freeze_marked(marks, k, t, W, indptr, indices, status, ft, active_deg, frozen_sum)
                nm += k
        ph_stats[phase, 5] = nh
        ph_stats[phase, 6] = nm
        phase += 1

    ph_load_off[phase] = off
    return t, active_edges, phase
