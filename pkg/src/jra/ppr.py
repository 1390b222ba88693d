"""Partial path reconstruction.

A tour is cut open around a set of released nodes ``V_S``. What survives are
alternating path segments; each is contracted to its two boundary nodes,
joined by a temporary edge, while its interior edges are reserved. The small
problem over boundary and released nodes is solved exactly and the full tour
is recovered as ``(L_n - L_t) | L_r``. Node ids are never renumbered.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exact import OPTIMAL, BranchAndCut, SolveOptions
from .tour import COST_TOL, Tour, TourError, cycle_path, edges_of, tour_cost

log = logging.getLogger(__name__)


class DegenerateReductionError(ValueError):
    """The reduced problem has fewer than two item-placeholder pairs."""


class RecoveryError(RuntimeError):
    """Recovered edge set is not a single alternating tour (a reduction bug)."""


@dataclass(frozen=True)
class Segment:
    q_I_s: tuple
    q_P_s: tuple
    interior_edges: frozenset

    @property
    def start_item(self) -> int:
        return self.q_I_s[0]

    @property
    def end_placeholder(self) -> int:
        return self.q_P_s[-1]

    @property
    def single_pair(self) -> bool:
        return len(self.q_I_s) == 1

    @property
    def temp_edge(self):
        return (self.start_item, self.end_placeholder)


@dataclass
class ReducedProblem:
    n: int
    segments: list
    free_nodes: frozenset
    reserved_edges: frozenset
    temporary_edges: frozenset
    offset_cost: float
    removed_edges: frozenset
    fixed_pair: bool = True
    original_edges: frozenset = field(default=frozenset(), repr=False)

    @property
    def items(self) -> list:
        """Item ids of the reduced problem, ascending."""
        out = {v for v in self.free_nodes if v <= self.n}
        out.update(s.start_item for s in self.segments)
        return sorted(out)

    @property
    def placeholders(self) -> list:
        out = {v for v in self.free_nodes if v > self.n}
        out.update(s.end_placeholder for s in self.segments)
        return sorted(out)

    @property
    def size(self) -> int:
        return len(self.items)

    def forced_edges(self) -> frozenset:
        """Edges every reduced solution must contain."""
        forced = set(self.temporary_edges)
        forced.update(s.temp_edge for s in self.segments if s.single_pair)
        n = self.n
        if self.fixed_pair and (n, 2 * n) not in self.reserved_edges:
            forced.add((n, 2 * n))
        return frozenset(forced)


def break_tour(inst, t: Tour, V_S, cost=None) -> ReducedProblem:
    """Release ``V_S`` from tour ``t`` and contract the surviving segments.

    A surviving run whose two ends are of the same kind gives up its last
    node (in tour order) to the released set, so every segment runs from an
    item to a placeholder. A run of a single node is released outright.
    """
    n = inst.n
    V_S = set(int(v) for v in V_S)
    if not V_S:
        raise ValueError("V_S must be non-empty")
    bad = [v for v in V_S if not 1 <= v <= 2 * n]
    if bad:
        raise ValueError(f"node ids {sorted(bad)} outside 1..{2 * n}")
    C = inst.cost_matrix() if cost is None else cost
    seq = t.sequence()
    m = len(seq)
    free = set(V_S)
    runs = []
    if len(free) < m:
        # rotate so the walk starts right after a released node
        k0 = next(k for k in range(m) if seq[k] in free)
        order = seq[k0 + 1:] + seq[: k0 + 1]
        cur = []
        for v in order:
            if v in free:
                if cur:
                    runs.append(cur)
                cur = []
            else:
                cur.append(v)
        if cur:
            runs.append(cur)
    segments = []
    for run in runs:
        if len(run) % 2 == 1:
            free.add(run[-1])
            run = run[:-1]
        if not run:
            continue
        if run[0] > n:
            run = run[::-1]
        q_I = tuple(run[0::2])
        q_P = tuple(run[1::2])
        interior = frozenset(
            (a, b) if a <= n else (b, a) for a, b in zip(run, run[1:])
        )
        segments.append(Segment(q_I, q_P, interior))
    reserved = frozenset().union(*(s.interior_edges for s in segments))
    temporary = frozenset(s.temp_edge for s in segments if not s.single_pair)
    offset = 0.0
    for s in segments:
        if not s.single_pair:
            offset += sum(C[i - 1, p - n - 1] for i, p in sorted(s.interior_edges))
    all_edges = edges_of(t)
    rp = ReducedProblem(
        n=n,
        segments=segments,
        free_nodes=frozenset(free),
        reserved_edges=reserved,
        temporary_edges=temporary,
        offset_cost=float(offset),
        removed_edges=frozenset(all_edges - reserved),
        fixed_pair=inst.fixed_pair,
        original_edges=all_edges,
    )
    if rp.size < 2:
        raise DegenerateReductionError(
            f"reduced problem has {rp.size} pair(s); at least 2 are required"
        )
    return rp


@dataclass
class ReducedSolution:
    edges: frozenset
    objective: float
    status: str
    stats: dict


def reduced_cost_matrix(inst, rp: ReducedProblem, cost=None):
    """Cost submatrix over the reduced nodes, temporary edges priced at zero."""
    n = inst.n
    C = inst.cost_matrix() if cost is None else cost
    items, places = rp.items, rp.placeholders
    R = C[np.ix_([i - 1 for i in items], [p - n - 1 for p in places])].copy()
    ri = {v: k for k, v in enumerate(items)}
    rpl = {v: k for k, v in enumerate(places)}
    for i, p in rp.temporary_edges:
        R[ri[i], rpl[p]] = 0.0
    return R, ri, rpl


def solve_reduced(inst, rp: ReducedProblem, opts: SolveOptions | None = None,
                  cost=None) -> ReducedSolution:
    """Exactly solve the contracted problem; returns its active edge set ``L_n``.

    The original connection pattern is installed as the warm start, so the
    result never costs more than the input tour.
    """
    opts = opts or SolveOptions()
    R, ri, rpl = reduced_cost_matrix(inst, rp, cost)
    items, places = rp.items, rp.placeholders
    m = len(items)
    forced = np.zeros((m, m), dtype=bool)
    for i, p in rp.forced_edges():
        forced[ri[i], rpl[p]] = True
    forbidden = np.zeros((m, m), dtype=bool)
    for i, p in opts.forbidden_edges:
        if i in ri and p in rpl:
            forbidden[ri[i], rpl[p]] = True
    for i, p in opts.forced_edges:
        if i in ri and p in rpl:
            forced[ri[i], rpl[p]] = True
    warm = np.zeros((m, m), dtype=np.uint8)
    for i, p in _original_pattern(rp):
        warm[ri[i], rpl[p]] = 1
    bc = BranchAndCut(
        R,
        forced=forced,
        forbidden=forbidden,
        warm_x=warm,
        time_limit=opts.time_limit,
        gap_tolerance=opts.gap_tolerance,
    )
    res = bc.run()
    if res.x is None:
        raise RecoveryError("reduced problem has no feasible tour")
    edges = frozenset((items[a], places[b]) for a, b in np.argwhere(res.x))
    return ReducedSolution(edges, float(res.cost), res.status, res.stats)


def _original_pattern(rp: ReducedProblem) -> frozenset:
    """Reduced-space edge set that re-creates the input tour."""
    nodes = set(rp.items) | set(rp.placeholders)
    kept = {e for e in rp.removed_edges if e[0] in nodes and e[1] in nodes}
    kept |= rp.temporary_edges
    kept.update(s.temp_edge for s in rp.segments if s.single_pair)
    return frozenset(kept)


def recover(rp: ReducedProblem, L_n, n: int | None = None) -> Tour:
    """Full tour from a reduced solution: ``(L_n - L_t) | L_r`` in cycle order."""
    n = rp.n if n is None else n
    L_star = (frozenset(L_n) - rp.temporary_edges) | rp.reserved_edges
    if len(L_star) != 2 * n:
        raise RecoveryError(f"recovered {len(L_star)} edges, expected {2 * n}")
    try:
        return cycle_path(L_star, n)
    except TourError as exc:
        raise RecoveryError(f"recovered edge set is not a tour: {exc}") from exc


@dataclass
class PPRResult:
    tour: Tour
    cost: float
    status: str
    reduced_size: int
    stats: dict


def reconstruct(inst, t: Tour, V_S, opts: SolveOptions | None = None,
                cost=None) -> PPRResult:
    """break_tour, solve_reduced and recover in one step; never worsens ``t``."""
    C = inst.cost_matrix() if cost is None else cost
    base = tour_cost(inst, t)
    rp = break_tour(inst, t, V_S, C)
    sol = solve_reduced(inst, rp, opts, C)
    new = recover(rp, sol.edges)
    new_cost = tour_cost(inst, new)
    if abs(new_cost - (sol.objective + rp.offset_cost)) > 1e-9 * max(1.0, new_cost):
        raise RecoveryError(
            f"offset mismatch: {new_cost} vs {sol.objective} + {rp.offset_cost}"
        )
    if new_cost > base + COST_TOL:
        raise RecoveryError(f"reconstruction worsened the tour: {new_cost} > {base}")
    if new_cost > base - COST_TOL:
        # no real gain: keep the input tour as is
        new, new_cost = t, base
    return PPRResult(new, new_cost, sol.status, rp.size, sol.stats)


def refine_merge(inst, t: Tour, collector, opts: SolveOptions | None = None,
                 return_result: bool = False):
    """Re-solve around the nodes touched by merging.

    Returns the refined tour, or the full :class:`PPRResult` when
    ``return_result`` is set. An empty collector leaves ``t`` unchanged.
    """
    if not collector:
        res = PPRResult(t, tour_cost(inst, t), OPTIMAL, 0, {})
    else:
        res = reconstruct(inst, t, collector, opts)
        log.info("ppr-merge: %d reduced pairs, cost %.6f (%s)",
                 res.reduced_size, res.cost, res.status)
    return res if return_result else res.tour


def expected_segments(t: Tour, V_S) -> int:
    """Number of maximal unreleased runs along ``t`` (before normalisation)."""
    seq = t.sequence()
    V_S = set(V_S)
    if len(V_S) >= len(seq):
        return 0
    return sum(
        1 for k in range(len(seq)) if seq[k] not in V_S and seq[k - 1] in V_S
    )


__all__ = [
    "DegenerateReductionError",
    "PPRResult",
    "RecoveryError",
    "ReducedProblem",
    "ReducedSolution",
    "Segment",
    "break_tour",
    "reconstruct",
    "recover",
    "reduced_cost_matrix",
    "refine_merge",
    "solve_reduced",
    "expected_segments",
]
