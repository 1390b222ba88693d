"""Exact solver for the simplified JRA model.

Binary edge variables on the complete item-placeholder graph, degree 2 at
every node, optional forced/forbidden edges, an optional cardinality row on a
retained edge set, and subtour elimination added lazily.

The search is a best-first branch-and-cut. A node's relaxation is the
minimum-cost bipartite 2-factor (degree constraints only, solved exactly as a
min-cost flow). Subtour elimination rows ``x(E(S)) <= |S| - 1`` are collected
lazily from disconnected relaxation solutions (smallest component first) and
priced into the 2-factor costs with Lagrange multipliers updated by
subgradient steps; the retain row is priced the same way. Reduced costs of the
final flow give an exact identity for every 2-factor, which drives edge fixing
and branching bounds.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .tour import Tour, cycle_path, edges_of

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
TIME_LIMIT = "feasible-time-limit"
INFEASIBLE = "infeasible"

ABS_TOL = 1e-9


class InfeasibleError(ValueError):
    """Constraints admit no alternating Hamiltonian cycle."""


@dataclass
class SolveOptions:
    time_limit: float | None = 60.0
    forced_edges: frozenset = frozenset()
    forbidden_edges: frozenset = frozenset()
    retain_set: frozenset | None = None
    retain_min: int | None = None
    # "ge" is the Large-alpha row, "eq" the fixed-exchange (k-opt style) row
    retain_mode: str = "ge"
    warm_start: Tour | None = None
    gap_tolerance: float = 0.0

    def __post_init__(self):
        self.forced_edges = frozenset(self.forced_edges)
        self.forbidden_edges = frozenset(self.forbidden_edges)
        if self.retain_set is not None:
            self.retain_set = frozenset(self.retain_set)
        if self.forced_edges & self.forbidden_edges:
            raise InfeasibleError("an edge is both forced and forbidden")
        if self.retain_min is not None:
            if self.retain_set is None:
                raise ValueError("retain_min needs retain_set")
            if self.retain_min > len(self.retain_set):
                raise InfeasibleError(
                    f"retain_min {self.retain_min} exceeds |L_s| = {len(self.retain_set)}"
                )
        if self.retain_mode not in ("ge", "eq"):
            raise ValueError(f"retain_mode must be 'ge' or 'eq', got {self.retain_mode!r}")
        if self.gap_tolerance < 0:
            raise ValueError("gap_tolerance must be nonnegative")


@dataclass
class SolveResult:
    edges: frozenset
    cost: float
    status: str
    stats: dict = field(default_factory=dict)
    lower_bound: float = -math.inf

    @property
    def tour(self) -> Tour | None:
        if not self.edges:
            return None
        n = len(self.edges) // 2
        return cycle_path(self.edges, n)


@dataclass
class MatrixResult:
    x: np.ndarray | None
    cost: float
    status: str
    lower_bound: float
    stats: dict


# --------------------------------------------------------------------------
# matrix-level search


def _cycles_of(x):
    """Components of a 2-regular 0/1 matrix as (item_idx list, place_idx list)."""
    n = x.shape[0]
    ii, pp = np.nonzero(x)
    rows = [[] for _ in range(n)]
    cols = [[] for _ in range(n)]
    for i, p in zip(ii.tolist(), pp.tolist()):
        rows[i].append(p)
        cols[p].append(i)
    seen_i = [False] * n
    seen_p = [False] * n
    out = []
    for s in range(n):
        if seen_i[s]:
            continue
        items, places = [], []
        stack = [(0, s)]
        seen_i[s] = True
        while stack:
            side, v = stack.pop()
            if side == 0:
                items.append(v)
                for p in rows[v]:
                    if not seen_p[p]:
                        seen_p[p] = True
                        stack.append((1, p))
            else:
                places.append(v)
                for i in cols[v]:
                    if not seen_i[i]:
                        seen_i[i] = True
                        stack.append((0, i))
        out.append((sorted(items), sorted(places)))
    return out


class _Cuts:
    """Pool of subtour elimination rows, stored as item/placeholder masks."""

    def __init__(self, n):
        self.n = n
        self.A = np.zeros((0, n))
        self.B = np.zeros((0, n))
        self.rhs = np.zeros(0)
        self._keys = {}

    def __len__(self):
        return len(self.rhs)

    def add(self, items, places):
        key = (tuple(items), tuple(places))
        if key in self._keys:
            return False
        a = np.zeros(self.n)
        b = np.zeros(self.n)
        a[items] = 1.0
        b[places] = 1.0
        self.A = np.vstack([self.A, a])
        self.B = np.vstack([self.B, b])
        self.rhs = np.append(self.rhs, len(items) + len(places) - 1)
        self._keys[key] = len(self.rhs) - 1
        return True

    def penalty(self, lam):
        if not len(lam):
            return 0.0
        return (self.A[: len(lam)] * lam[:, None]).T @ self.B[: len(lam)]

    def lhs(self, x, k):
        if not k:
            return np.zeros(0)
        xf = x.astype(np.float64)
        return ((self.A[:k] @ xf) * self.B[:k]).sum(axis=1)


@dataclass
class _Node:
    bound: float
    depth: int
    forced: np.ndarray
    forbidden: np.ndarray
    lam: np.ndarray
    mu: float


class BranchAndCut:
    """One exact search over an ``n x n`` item-placeholder cost matrix."""

    def __init__(
        self,
        cost,
        forced=None,
        forbidden=None,
        retain=None,
        retain_min=None,
        retain_mode="ge",
        warm_x=None,
        time_limit=None,
        gap_tolerance=0.0,
        root_iters=300,
        node_iters=20,
    ):
        self.C = np.asarray(cost, dtype=np.float64)
        n = self.n = self.C.shape[0]
        self.forced0 = np.zeros((n, n), bool) if forced is None else np.asarray(forced, bool)
        self.forbidden0 = (
            np.zeros((n, n), bool) if forbidden is None else np.asarray(forbidden, bool)
        )
        self.forbidden0 = self.forbidden0 | ~np.isfinite(self.C)
        self.R = None if retain is None else np.asarray(retain, bool)
        self.r = 0 if retain_min is None else int(retain_min)
        self.mode = retain_mode
        if self.R is not None and self.mode == "ge" and self.r <= 0:
            self.R = None  # vacuous row
        self.Rf = None if self.R is None else self.R.astype(np.float64)
        self.time_limit = time_limit
        self.gap = gap_tolerance
        self.root_iters = root_iters
        self.node_iters = node_iters
        self.cuts = _Cuts(n)
        self._branch_order = "cycle"
        self.ub = math.inf
        self.best_x = None
        self.stats = {"branch_nodes": 0, "subtour_cuts_added": 0, "wall_time": 0.0}
        self.t0 = time.perf_counter()
        self._tick = itertools.count()
        self.Cz = np.where(np.isfinite(self.C), self.C, 0.0)
        if warm_x is not None:
            self._offer(np.asarray(warm_x, dtype=np.uint8), "warm start")

    # -- bookkeeping -------------------------------------------------------

    def _elapsed(self):
        return time.perf_counter() - self.t0

    def _out_of_time(self):
        return self.time_limit is not None and self._elapsed() > self.time_limit

    def _prune_level(self):
        return self.ub - max(ABS_TOL, self.gap * abs(self.ub))

    def _retain_ok(self, x):
        if self.R is None:
            return True
        k = int((x.astype(bool) & self.R).sum())
        return k >= self.r if self.mode == "ge" else k == self.r

    def _feasible(self, x):
        if x.shape != (self.n, self.n):
            return False
        if not ((x.sum(0) == 2).all() and (x.sum(1) == 2).all()):
            return False
        xb = x.astype(bool)
        if (xb & self.forbidden0).any() or (self.forced0 & ~xb).any():
            return False
        if not self._retain_ok(x):
            return False
        return len(_cycles_of(x)) == 1

    def _offer(self, x, source):
        if not self._feasible(x):
            return False
        val = float(self.Cz[x.astype(bool)].sum())
        if val < self.ub - ABS_TOL:
            self.ub = val
            self.best_x = x.copy()
            log.info("incumbent %.6f @ %.3f (%s)", val, self._elapsed(), source)
            return True
        return False

    # -- node preparation ---------------------------------------------------

    def _close_paths(self, forced, forbidden):
        """Check forced edges form paths; forbid edges closing a short path.

        Returns False if the forced edges alone are infeasible.
        """
        n = self.n
        if (forced.sum(1) > 2).any() or (forced.sum(0) > 2).any():
            return False
        parent = list(range(2 * n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        count = int(forced.sum())
        size = [0] * (2 * n)
        for i, p in zip(*np.nonzero(forced)):
            a, b = find(i), find(n + p)
            if a == b:
                # closed cycle among forced edges: only valid if Hamiltonian
                return count == 2 * n and len(_cycles_of(forced.astype(np.uint8))) == 1
            parent[a] = b
            size[b] += size[a] + 1
        if count >= 2 * n - 1:
            return True
        deg_i = forced.sum(1)
        deg_p = forced.sum(0)
        ends = {}
        for v in range(n):
            if deg_i[v] == 1:
                ends.setdefault(find(v), []).append(("i", v))
            if deg_p[v] == 1:
                ends.setdefault(find(n + v), []).append(("p", v))
        for root, pair in ends.items():
            if len(pair) == 2 and size[root] >= 3:
                kinds = {k for k, _ in pair}
                if kinds == {"i", "p"}:
                    i = next(v for k, v in pair if k == "i")
                    p = next(v for k, v in pair if k == "p")
                    forbidden[i, p] = True
        return True

    def _viable(self, forced, forbidden):
        if not self._close_paths(forced, forbidden):
            return False
        if (forced & forbidden).any():
            return False
        avail = ~forbidden
        if (avail.sum(1) < 2).any() or (avail.sum(0) < 2).any():
            return False
        if self.R is not None:
            if int((self.R & ~forbidden).sum()) < self.r:
                return False
            if self.mode == "eq" and int((self.R & forced).sum()) > self.r:
                return False
        return True

    # -- relaxation ---------------------------------------------------------

    def _relax(self, forced, forbidden, lam, mu):
        """Lagrangian 2-factor at given multipliers.

        Returns (value, x, rc) or None when no 2-factor exists.
        """
        k = len(lam)
        M = self.Cz.copy()
        const = 0.0
        if k:
            M += self.cuts.penalty(lam)
            const -= float(lam @ self.cuts.rhs[:k])
        if self.R is not None:
            M -= mu * self.Rf
            const += mu * self.r
        avail = ~forced & ~forbidden
        bi = 2 - forced.sum(1)
        bp = 2 - forced.sum(0)
        x, pot_i, pot_p, ok = kernels.two_factor(M, avail, bi, bp)
        if not ok:
            return None
        x = x.astype(bool) | forced
        rc = M + pot_i[:, None] - pot_p[None, :]
        rc[~avail] = 0.0
        value = float(M[x].sum()) + const
        return value, x, rc

    def _process(self, node, max_iters, theta0):
        """Subgradient loop at one node.

        Returns ("prune", None) or ("branch", info) with info holding the best
        Lagrangian state.
        """
        forced, forbidden = node.forced, node.forbidden
        lam = np.concatenate([node.lam, np.zeros(len(self.cuts) - len(node.lam))])
        mu = node.mu
        best = None
        theta = theta0
        stall = 0
        for it in range(max_iters):
            if self._out_of_time():
                break
            res = self._relax(forced, forbidden, lam, mu)
            if res is None:
                return "prune", None
            value, x, rc = res
            improved = best is None or value > best[0] + 1e-12
            if improved:
                best = (value, x, rc, lam.copy(), mu)
                stall = 0
            else:
                stall += 1
                if stall >= 4:
                    theta *= 0.5
                    stall = 0
            if best[0] >= self._prune_level():
                return "prune", None
            xu = x.astype(np.uint8)
            cycles = _cycles_of(xu)
            retain_ok = self._retain_ok(x)
            if len(cycles) == 1:
                self._offer(xu, "relaxation")
                if retain_ok:
                    true = float(self.Cz[x].sum())
                    if true - value <= max(ABS_TOL, 1e-12 * abs(true)):
                        # complementary slackness holds: node solved
                        return "prune", None
                if best[0] >= self._prune_level():
                    return "prune", None
            else:
                smallest = min(cycles, key=lambda c: (len(c[0]), c[0]))
                if self.cuts.add(*smallest):
                    self.stats["subtour_cuts_added"] += 1
                    log.debug(
                        "cut added |S|=%d", len(smallest[0]) + len(smallest[1])
                    )
                    lam = np.append(lam, 0.0)
                if improved:
                    self._patch(cycles, x)
            # subgradient
            k = len(lam)
            g = self.cuts.lhs(x, k) - self.cuts.rhs[:k]
            g = np.where((lam <= 0) & (g < 0), 0.0, g)
            gm = 0.0
            if self.R is not None:
                gm = self.r - float((x & self.R).sum())
                if self.mode == "ge" and mu <= 0 and gm < 0:
                    gm = 0.0
            norm = float(g @ g) + gm * gm
            if norm == 0.0:
                break
            target = self.ub if math.isfinite(self.ub) else best[0] + 0.02 * abs(best[0]) + 1.0
            step = theta * max(target - value, 1e-9 * (1 + abs(value))) / norm
            lam = np.maximum(0.0, lam + step * g)
            mu = mu + step * gm
            if self.mode == "ge":
                mu = max(0.0, mu)
            if theta < 1e-4:
                break
        if best is None:
            return "branch", None
        return "branch", best

    def _patch(self, cycles, x):
        """Primal heuristic: greedily splice relaxation subtours into one tour."""
        n = self.n
        C = self.C
        protect = self.forced0
        blocked = self.forbidden0
        xs = x.copy()
        label_i = np.empty(n, dtype=np.int64)
        for c, (items, _) in enumerate(cycles):
            label_i[items] = c
        remaining = len(cycles)
        while remaining > 1:
            edges = np.argwhere(xs & ~protect)
            ei, ep = edges[:, 0], edges[:, 1]
            lab = label_i[ei]
            ce = C[ei, ep]
            # delta of removing (ia,pa),(ib,pb) and adding (ia,pb),(ib,pa)
            cross = C[ei[:, None], ep[None, :]]
            delta = cross + cross.T - ce[:, None] - ce[None, :]
            bad = (lab[:, None] == lab[None, :]) | blocked[ei[:, None], ep[None, :]]
            bad = bad | bad.T
            delta = np.where(bad, np.inf, delta)
            k = int(np.argmin(delta))
            a, b = divmod(k, len(edges))
            if not np.isfinite(delta[a, b]):
                return
            ia, pa, ib, pb = ei[a], ep[a], ei[b], ep[b]
            xs[ia, pa] = xs[ib, pb] = False
            xs[ia, pb] = xs[ib, pa] = True
            label_i[label_i == label_i[ib]] = label_i[ia]
            remaining -= 1
        self._offer(xs.astype(np.uint8), "patched relaxation")

    def _fix_by_reduced_cost(self, best, forced, forbidden):
        if not math.isfinite(self.ub):
            return
        value, x, rc = best[0], best[1], best[2]
        room = self._prune_level() - value
        free = ~forced & ~forbidden
        kill = free & ~x & (rc >= room)
        forbidden |= kill
        keep = free & x & (-rc >= room)
        forced |= keep

    def run(self):
        root = _Node(
            bound=-math.inf,
            depth=0,
            forced=self.forced0.copy(),
            forbidden=self.forbidden0.copy(),
            lam=np.zeros(0),
            mu=0.0,
        )
        lower = math.inf
        timed_out = False
        if not self._viable(root.forced, root.forbidden):
            return self._finish(INFEASIBLE, math.inf)
        heap = [(root.bound, 0, next(self._tick), root)]
        while heap:
            bound, _, _, node = heapq.heappop(heap)
            if bound >= self._prune_level():
                continue
            if self._out_of_time():
                timed_out = True
                lower = min(lower, bound)
                for item in heap:
                    lower = min(lower, item[0])
                break
            self.stats["branch_nodes"] += 1
            first = node.depth == 0
            verdict, best = self._process(
                node,
                self.root_iters if first else self.node_iters,
                2.0 if first else 1.0,
            )
            if verdict == "prune":
                continue
            if best is None:
                timed_out = True
                lower = min(lower, bound)
                for item in heap:
                    lower = min(lower, item[0])
                break
            value, x, rc, lam, mu = best
            forced = node.forced.copy()
            forbidden = node.forbidden.copy()
            self._fix_by_reduced_cost(best, forced, forbidden)
            if not self._viable(forced, forbidden):
                continue
            order = self._choose_branch(x, rc, forced)
            if not order:
                # everything fixed yet no certificate; solve the leaf directly
                self._offer(x.astype(np.uint8), "leaf")
                continue
            # child j forbids order[j] and forces order[:j]; together the
            # children cover every tour, since a tour cannot contain a
            # whole subtour of the relaxation
            fo = forced.copy()
            for i, p in order:
                pen = max(0.0, -float(rc[i, p]))
                fb = forbidden.copy()
                fb[i, p] = True
                if self._viable(fo.copy(), fb):
                    kid = _Node(max(value + pen, bound), node.depth + 1, fo.copy(), fb, lam, mu)
                    if kid.bound < self._prune_level():
                        heapq.heappush(heap, (kid.bound, -kid.depth, next(self._tick), kid))
                fo[i, p] = True
                if not self._viable(fo, forbidden.copy()):
                    break
            else:
                if self._viable(fo, forbidden.copy()):
                    kid = _Node(max(value, bound), node.depth + 1, fo, forbidden.copy(), lam, mu)
                    if kid.bound < self._prune_level():
                        heapq.heappush(heap, (kid.bound, -kid.depth, next(self._tick), kid))
        if timed_out:
            status = TIME_LIMIT if self.best_x is not None else INFEASIBLE
            return self._finish(status, lower)
        if self.best_x is None:
            return self._finish(INFEASIBLE, math.inf)
        return self._finish(OPTIMAL, self.ub)

    def _choose_branch(self, x, rc, forced):
        """Ordered free edges to branch on.

        Within the smallest subtour holding a free edge, starts at the edge
        with the largest removal penalty (ties to the lowest (i, p)) and
        follows the cycle. A connected relaxation yields just that edge.
        """
        cycles = _cycles_of(x.astype(np.uint8))
        free = x & ~forced
        scope = None
        if len(cycles) > 1:
            for items, places in sorted(cycles, key=lambda c: (len(c[0]), c[0])):
                m = np.zeros_like(free)
                m[np.ix_(items, places)] = True
                if (free & m).any():
                    scope = m
                    break
        cand = np.argwhere(free if scope is None else free & scope)
        if len(cand) == 0:
            return []
        pen = -rc[cand[:, 0], cand[:, 1]]
        top = pen.max()
        i0, p0 = (int(v) for v in cand[pen >= top - 1e-12][0])
        if scope is None:
            return [(i0, p0)]
        # walk the subtour from (i0, p0) and collect its free edges in order
        order = [(i0, p0)]
        prev_i, cur_p = i0, p0
        while True:
            nxt_i = next(int(i) for i in np.flatnonzero(x[:, cur_p]) if i != prev_i)
            nxt_p = next(int(p) for p in np.flatnonzero(x[nxt_i]) if p != cur_p)
            if (nxt_i, cur_p) == (i0, p0):
                break
            for e in ((nxt_i, cur_p), (nxt_i, nxt_p)):
                if e == (i0, p0):
                    break
                if free[e] and e not in order:
                    order.append(e)
            else:
                prev_i, cur_p = nxt_i, nxt_p
                continue
            break
        if self._branch_order == "penalty":
            order = [order[0]] + sorted(order[1:], key=lambda e: (rc[e], e))
        return order

    def _finish(self, status, lower):
        self.stats["wall_time"] = self._elapsed()
        self.stats["cut_pool"] = len(self.cuts)
        if status == OPTIMAL:
            lower = self.ub
        cost = self.ub if self.best_x is not None else math.inf
        return MatrixResult(self.best_x, cost, status, lower, dict(self.stats))


# --------------------------------------------------------------------------
# instance-level API


def _mask(edges, n):
    m = np.zeros((n, n), dtype=bool)
    for i, p in edges:
        m[i - 1, p - n - 1] = True
    return m


def _x_from_edges(edges, n):
    return _mask(edges, n).astype(np.uint8)


def _edges_from_x(x, n):
    return frozenset((int(i) + 1, int(p) + n + 1) for i, p in np.argwhere(x))


def solve(inst, opts: SolveOptions | None = None) -> SolveResult:
    """Exact solve of the JRA model on ``inst`` under ``opts``."""
    opts = opts or SolveOptions()
    n = inst.n
    forced = _mask(opts.forced_edges, n)
    if inst.fixed_pair:
        forced[n - 1, n - 1] = True
    forbidden = _mask(opts.forbidden_edges, n)
    if (forced & forbidden).any():
        raise InfeasibleError("fixed pair edge is forbidden")
    retain = None if opts.retain_set is None else _mask(opts.retain_set, n)
    warm = None
    if opts.warm_start is not None:
        warm = _x_from_edges(edges_of(opts.warm_start), n)
    bc = BranchAndCut(
        inst.cost_matrix(),
        forced=forced,
        forbidden=forbidden,
        retain=retain,
        retain_min=opts.retain_min,
        retain_mode=opts.retain_mode,
        warm_x=warm,
        time_limit=opts.time_limit,
        gap_tolerance=opts.gap_tolerance,
    )
    if warm is None and not opts.forced_edges and not opts.forbidden_edges:
        heuristic = _heuristic_tour(inst)
        if heuristic is not None:
            bc._offer(_x_from_edges(edges_of(heuristic), n), "merge heuristic")
    res = bc.run()
    return _to_result(res, n)


def _heuristic_tour(inst):
    from .assignment import two_way_assign
    from .merging import merge_cycles

    try:
        tour, _ = merge_cycles(inst, two_way_assign(inst))
    except ValueError:
        return None
    return tour


def _to_result(res: MatrixResult, n: int) -> SolveResult:
    edges = frozenset() if res.x is None else _edges_from_x(res.x, n)
    return SolveResult(edges, res.cost, res.status, res.stats, res.lower_bound)


def solve_large_alpha(inst, incumbent: Tour, alpha: float, opts: SolveOptions | None = None,
                      mode: str = "ge") -> SolveResult:
    """Re-optimise keeping at least ceil(2n(1 - alpha)) edges of ``incumbent``.

    With ``mode="eq"`` exactly ``2n - floor(2n * alpha)`` edges are kept, the
    fixed-exchange analogue of a k-opt move.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    n = inst.n
    base = opts or SolveOptions()
    ls = edges_of(incumbent)
    if mode == "ge":
        keep = retain_min_for(n, alpha)
    else:
        keep = 2 * n - math.floor(2 * n * alpha + 1e-12)
    o = SolveOptions(
        time_limit=base.time_limit,
        forced_edges=base.forced_edges,
        forbidden_edges=base.forbidden_edges,
        retain_set=ls,
        retain_min=keep,
        retain_mode=mode,
        warm_start=incumbent if mode == "ge" else base.warm_start,
        gap_tolerance=base.gap_tolerance,
    )
    return solve(inst, o)


def retain_min_for(n: int, alpha: float) -> int:
    """``ceil(2n(1 - alpha))`` with a guard against float noise at exact integers."""
    v = 2 * n * (1 - alpha)
    r = round(v)
    return int(r) if abs(v - r) < 1e-9 else math.ceil(v)
