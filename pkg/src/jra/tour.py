"""Tours as two ordered id lists, their edge sets and the cycle reconstruction.

A tour ``(q_I, q_P)`` visits ``q_I[0], q_P[0], q_I[1], q_P[1], ...`` and closes
back to ``q_I[0]``; item ``q_I[k]`` touches ``q_P[k-1]`` and ``q_P[k]``.
Edges are stored as ``(item_id, placeholder_id)`` tuples.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COST_TOL = 1e-9


class TourError(ValueError):
    """A tour or edge set violates a structural invariant."""


class DegreeError(TourError):
    def __init__(self, node, degree):
        super().__init__(f"node {node} has degree {degree}, expected 2")
        self.node = node
        self.degree = degree


class SubtourError(TourError):
    def __init__(self, sizes):
        super().__init__(
            f"edge set splits into {len(sizes)} cycles with pair counts {sizes}"
        )
        self.sizes = sizes


@dataclass(frozen=True)
class Tour:
    q_I: tuple
    q_P: tuple

    def __post_init__(self):
        object.__setattr__(self, "q_I", tuple(int(v) for v in self.q_I))
        object.__setattr__(self, "q_P", tuple(int(v) for v in self.q_P))

    @property
    def n(self) -> int:
        return len(self.q_I)

    def sequence(self) -> list:
        """Interleaved node order ``[i_1, p_1, i_2, p_2, ...]``."""
        out = []
        for i, p in zip(self.q_I, self.q_P):
            out.append(i)
            out.append(p)
        return out

    def reversed(self) -> "Tour":
        # walking backwards from q_I[0]: q_P[-1], q_I[-1], q_P[-2], ...
        q_I = (self.q_I[0],) + tuple(reversed(self.q_I[1:]))
        q_P = tuple(reversed(self.q_P))
        return Tour(q_I, q_P)

    def rotated(self, k: int) -> "Tour":
        k %= self.n
        return Tour(self.q_I[k:] + self.q_I[:k], self.q_P[k:] + self.q_P[:k])

    def canonical(self) -> "Tour":
        return cycle_path(edges_of(self), self.n)

    def to_dict(self, cost=None) -> dict:
        d = {"q_I": list(self.q_I), "q_P": list(self.q_P)}
        if cost is not None:
            d["cost"] = cost
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Tour":
        try:
            return cls(data["q_I"], data["q_P"])
        except (KeyError, TypeError) as exc:
            raise TourError(f"malformed tour JSON: {exc}") from exc


def validate(t: Tour, n: int, fixed_pair: bool = False) -> None:
    """Raise :class:`TourError` naming the first violated invariant."""
    if len(t.q_I) != n or len(t.q_P) != n:
        raise TourError(
            f"tour has {len(t.q_I)} items and {len(t.q_P)} placeholders, expected {n}"
        )
    if sorted(t.q_I) != list(range(1, n + 1)):
        raise TourError("q_I is not a permutation of the items 1..n")
    if sorted(t.q_P) != list(range(n + 1, 2 * n + 1)):
        raise TourError(f"q_P is not a permutation of the placeholders {n + 1}..{2 * n}")
    if fixed_pair and (n, 2 * n) not in edges_of(t):
        raise TourError(f"fixed pair edge ({n}, {2 * n}) missing")


def edges_of(t: Tour) -> frozenset:
    m = len(t.q_I)
    edges = set()
    for k in range(m):
        edges.add((t.q_I[k], t.q_P[k - 1]))
        edges.add((t.q_I[k], t.q_P[k]))
    return frozenset(edges)


def tour_cost(inst, t: Tour) -> float:
    validate(t, inst.n, inst.fixed_pair)
    return sum(inst.cost(i, p) for i, p in sorted(edges_of(t)))


def edges_cost(cost: np.ndarray, edges, n: int) -> float:
    """Sum of edge costs from a dense matrix (row item-1, column placeholder-n-1)."""
    if not edges:
        return 0.0
    arr = np.array(sorted(edges), dtype=np.int64)
    return float(cost[arr[:, 0] - 1, arr[:, 1] - n - 1].sum())


def _adjacency(edges, n):
    adj = defaultdict(list)
    for i, p in edges:
        if not (1 <= i <= n and n < p <= 2 * n):
            raise TourError(f"edge ({i}, {p}) is not item-placeholder")
        adj[i].append(p)
        adj[p].append(i)
    for v in range(1, 2 * n + 1):
        if len(adj[v]) != 2:
            raise DegreeError(v, len(adj[v]))
    return adj


def components(edges, n: int) -> list:
    """Node sets of the cycles of a 2-regular bipartite edge set.

    Sorted by smallest contained item id.
    """
    adj = _adjacency(edges, n)
    seen = set()
    comps = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def walk_cycle(adj, start_item: int, first_placeholder: int):
    """Follow a 2-regular cycle from an item along a given first edge."""
    q_I, q_P = [start_item], [first_placeholder]
    prev, cur = start_item, first_placeholder
    while True:
        a, b = adj[cur]
        nxt = b if a == prev else a
        if nxt == start_item:
            break
        q_I.append(nxt)
        a, b = adj[nxt]
        p = b if a == cur else a
        q_P.append(p)
        prev, cur = nxt, p
    return q_I, q_P


def cycle_path(edges, n: int) -> Tour:
    """Ordered item/placeholder sequences of a single alternating cycle.

    Canonical form: starts at item 1, and the placeholder after item 1 is the
    smaller of its two neighbours.
    """
    edges = frozenset(edges)
    adj = _adjacency(edges, n)
    comps = components(edges, n)
    if len(comps) > 1:
        raise SubtourError([len(c) // 2 for c in comps])
    q_I, q_P = walk_cycle(adj, 1, min(adj[1]))
    return Tour(q_I, q_P)


def edge_difference(a, b) -> int:
    """Size of the symmetric difference of two edge sets (the N_d statistic)."""
    return len(set(a) ^ set(b))


def dumps(t: Tour, cost=None) -> str:
    return json.dumps(t.to_dict(cost), indent=2) + "\n"


def save(t: Tour, path, cost=None) -> None:
    Path(path).write_text(dumps(t, cost))


def load(path) -> Tour:
    return Tour.from_dict(json.loads(Path(path).read_text()))
