"""Greedy cycle merging with node collection.

Every round removes one edge from each of two different cycles and
reconnects the four endpoints item-to-placeholder, choosing the globally
cheapest such exchange. The touched nodes are gathered into the collector
that later seeds a partial path reconstruction.
"""

from __future__ import annotations

import numpy as np

from .tour import cycle_path

TIE_TOL = 1e-12


def merge_cycles(inst, cs, return_deltas: bool = False):
    """Merge a :class:`CycleSet` into one tour.

    Returns ``(tour, collector)``; with ``return_deltas`` also the applied
    per-merge cost increments.
    """
    if len(cs) == 0:
        raise ValueError("empty cycle set")
    n = inst.n
    C = inst.cost_matrix()
    edges = sorted(cs.edges())
    if len(edges) != 2 * n:
        raise ValueError(f"cycle set covers {len(edges) // 2} pairs, expected {n}")
    ei = np.array([e[0] - 1 for e in edges], dtype=np.int64)
    ep = np.array([e[1] - n - 1 for e in edges], dtype=np.int64)
    label = np.empty(2 * n, dtype=np.int64)
    where = {}
    for k, c in enumerate(cs.cycles):
        for v in c.q_I:
            where[v] = k
    label[:] = [where[e[0]] for e in edges]
    collector = set()
    deltas = []
    if len(cs) == 1:
        tour = cycle_path(edges, n)
        return (tour, collector, deltas) if return_deltas else (tour, collector)

    fixed = np.zeros(2 * n, dtype=bool)
    if inst.fixed_pair:
        fixed = (ei == n - 1) & (ep == n - 1)

    def rows(slots):
        # delta[a, b] for the given edge slots a against every slot b
        a_i, a_p = ei[slots][:, None], ep[slots][:, None]
        d = C[a_i, ep[None, :]] + C[ei[None, :], a_p] - C[a_i, a_p] - C[ei, ep][None, :]
        d[label[slots][:, None] == label[None, :]] = np.inf
        d[:, fixed] = np.inf
        d[fixed[slots], :] = np.inf
        return d

    D = rows(np.arange(2 * n))
    for _ in range(len(cs) - 1):
        best = D.min()
        if not np.isfinite(best):
            raise ValueError("no admissible reconnection left")
        cand = np.argwhere(D <= best + TIE_TOL)
        a, b = min(
            (tuple(sorted(((ei[a], ep[a]), (ei[b], ep[b])))), a, b) for a, b in cand
        )[1:]
        ia, pa, ib, pb = ei[a], ep[a], ei[b], ep[b]
        deltas.append(float(D[a, b]))
        collector.update({int(ia) + 1, int(pa) + n + 1, int(ib) + 1, int(pb) + n + 1})
        # slot a becomes (ia, pb), slot b becomes (ib, pa)
        ep[a], ep[b] = pb, pa
        la, lb = label[a], label[b]
        members_b = label == lb
        members_a = label == la
        D[np.ix_(members_a, members_b)] = np.inf
        D[np.ix_(members_b, members_a)] = np.inf
        label[members_b] = la
        slots = np.array([a, b])
        fresh = rows(slots)
        D[slots, :] = fresh
        D[:, slots] = fresh.T
    final = {(int(i) + 1, int(p) + n + 1) for i, p in zip(ei, ep)}
    tour = cycle_path(final, n)
    return (tour, collector, deltas) if return_deltas else (tour, collector)
