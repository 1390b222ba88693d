"""Hungarian assignment and the two-way assignment that seeds cycle merging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .tour import Tour, _adjacency, components, walk_cycle


class AssignmentInfeasible(ValueError):
    """No perfect assignment with finite cost exists."""


def hungarian(cost_matrix):
    """Minimum-cost perfect assignment of rows to columns.

    ``inf`` marks forbidden cells. Returns ``(perm, total)`` where row ``r`` is
    assigned column ``perm[r]``.

    >>> hungarian([[1, 2], [3, 1]])
    ([0, 1], 2.0)
    """
    c = np.asarray(cost_matrix, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if np.isnan(c).any() or (c == -np.inf).any():
        raise ValueError("cost matrix has NaN or -inf entries")
    if c.shape[0] == 0:
        return [], 0.0
    perm, ok = kernels.lap(c)
    if not ok:
        raise AssignmentInfeasible("no finite-cost perfect matching")
    perm = [int(j) for j in perm]
    return perm, float(c[np.arange(len(perm)), perm].sum())


@dataclass(frozen=True)
class CycleSet:
    """Node-disjoint alternating cycles, each stored as a ``Tour`` fragment."""

    cycles: tuple

    def __len__(self):
        return len(self.cycles)

    def edges(self) -> frozenset:
        out = set()
        for c in self.cycles:
            m = len(c.q_I)
            for k in range(m):
                out.add((c.q_I[k], c.q_P[k - 1]))
                out.add((c.q_I[k], c.q_P[k]))
        return frozenset(out)

    def nodes(self) -> set:
        return {v for c in self.cycles for v in c.q_I + c.q_P}


def detect_cycles(edges, n: int) -> CycleSet:
    """Split a 2-regular bipartite edge set into its cycles.

    Cycles are ordered by smallest item id; each starts at that item and
    leaves through its smaller placeholder neighbour.
    """
    adj = _adjacency(edges, n)
    out = []
    for comp in components(edges, n):
        start = comp[0]
        q_I, q_P = walk_cycle(adj, start, min(adj[start]))
        out.append(Tour(q_I, q_P))
    return CycleSet(tuple(out))


def two_way_assign(inst, return_passes: bool = False):
    """Forward item->placeholder and backward placeholder->item assignments.

    The backward pass may not reuse any forward cell, so the union is a simple
    2-regular graph. With the fixed pair on, (n, 2n) is pinned in the forward
    pass.
    """
    n = inst.n
    c = inst.cost_matrix()
    fwd = c.copy()
    if inst.fixed_pair:
        fwd[n - 1, :] = np.inf
        fwd[:, n - 1] = np.inf
        fwd[n - 1, n - 1] = c[n - 1, n - 1]
    perm_f, _ = hungarian(fwd)
    back = c.T.copy()  # rows: placeholders
    back[perm_f, np.arange(n)] = np.inf
    perm_b, _ = hungarian(back)
    forward = {(i + 1, perm_f[i] + n + 1) for i in range(n)}
    backward = {(perm_b[p] + 1, p + n + 1) for p in range(n)}
    cs = detect_cycles(forward | backward, n)
    if return_passes:
        return cs, frozenset(forward), frozenset(backward)
    return cs
