"""Spatially localised polishing: PPR inside circles stepped along the tour."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .exact import OPTIMAL, SolveOptions
from .ppr import DegenerateReductionError, reconstruct
from .tour import COST_TOL, Tour, tour_cost

DEFAULT_CIRCLE_TIME = 5.0


@dataclass(frozen=True)
class PolishConfig:
    radius: float = 0.2
    n_stp: int = 3
    passes: int = 2
    target_nodes: int | None = None
    sigma: float | None = None
    kappa: float | None = None
    eta: int = 3
    centers: tuple | None = None

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if int(self.n_stp) != self.n_stp or self.n_stp < 1:
            raise ValueError(f"n_stp must be a positive integer, got {self.n_stp}")
        if int(self.passes) != self.passes or self.passes < 1:
            raise ValueError(f"passes must be a positive integer, got {self.passes}")
        if self.eta < 1:
            raise ValueError(f"eta must be a positive integer, got {self.eta}")
        if self.centers is not None:
            object.__setattr__(
                self, "centers", tuple((float(x), float(y)) for x, y in self.centers)
            )

    def resolve(self, n: int, area: float = 1.0) -> tuple:
        """Effective ``(radius, n_stp)`` for an instance of ``n`` pairs."""
        r = self.radius
        if self.target_nodes is not None:
            r = adaptive_radius(n, area, self.target_nodes)
        elif self.sigma is not None:
            r = self.sigma * math.sqrt(area / n)
        stp = self.n_stp
        if self.kappa is not None:
            stp = step_length(r, n, area, self.kappa)
        return r, stp


def select_in_circle(inst, center, r_r: float) -> set:
    """Node ids within distance ``r_r`` of ``center`` (boundary included)."""
    if not r_r > 0:
        raise ValueError(f"radius must be positive, got {r_r}")
    pts = inst.coords()
    d = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
    return {int(v) + 1 for v in np.flatnonzero(d <= r_r)}


def expected_count(n: int, area: float, r_r: float) -> float:
    """Expected number of items inside a circle of radius ``r_r``."""
    return math.pi * r_r * r_r * n / area


def adaptive_radius(n: int, area: float, n_in: float) -> float:
    """Radius whose circle holds ``n_in`` items on average: sqrt(n_in S / (pi n))."""
    if n <= 0 or area <= 0 or n_in <= 0:
        raise ValueError("n, area and n_in must all be positive")
    return math.sqrt(n_in * area / (math.pi * n))


def step_length(r_r: float, n: int, area: float, kappa: float) -> int:
    """Waypoint spacing in items: round(2 kappa r_r / d_s) with d_s = sqrt(S/n), at least 1."""
    if r_r <= 0 or n <= 0 or area <= 0 or kappa <= 0:
        raise ValueError("r_r, n, area and kappa must all be positive")
    d_s = math.sqrt(area / n)
    return max(1, int(round(2.0 * kappa * r_r / d_s)))


@dataclass
class CircleRecord:
    center: tuple
    selected: int
    delta: float
    time: float
    status: str = "skipped"
    reduced_pairs: int = 0


@dataclass
class PolishStats:
    radius: float
    n_stp: int
    circles: list = field(default_factory=list)
    pass_costs: list = field(default_factory=list)
    pass_times: list = field(default_factory=list)
    skipped: int = 0
    time_limited: int = 0

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "n_stp": self.n_stp,
            "pass_costs": list(self.pass_costs),
            "pass_times": list(self.pass_times),
            "skipped": self.skipped,
            "time_limited": self.time_limited,
            "circles": [
                {
                    "center": list(c.center),
                    "|V_r|": c.selected,
                    "delta": c.delta,
                    "time": c.time,
                    "status": c.status,
                    "reduced_pairs": c.reduced_pairs,
                }
                for c in self.circles
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _waypoints(inst, t: Tour, n_stp: int) -> list:
    anchor = inst.n if inst.fixed_pair else 1
    q = list(t.q_I)
    k = q.index(anchor)
    q = q[k:] + q[:k]
    return [tuple(float(c) for c in inst.coord(v)) for v in q[::n_stp]]


def polish_pass(inst, t: Tour, r_r: float, n_stp: int, opts: SolveOptions,
                stats: PolishStats, centers=None) -> Tour:
    C = inst.cost_matrix()
    cur_cost = tour_cost(inst, t)
    if centers is None:
        # waypoints come from the tour at the start of the pass
        centers = _waypoints(inst, t, n_stp)
    for center in centers:
        V_r = select_in_circle(inst, center, r_r)
        rec = CircleRecord(tuple(center), len(V_r), 0.0, 0.0)
        stats.circles.append(rec)
        if len(V_r) < 2:
            stats.skipped += 1
            continue
        t0 = time.perf_counter()
        try:
            res = reconstruct(inst, t, V_r, opts, C)
        except DegenerateReductionError:
            stats.skipped += 1
            rec.time = time.perf_counter() - t0
            continue
        rec.time = time.perf_counter() - t0
        rec.status = res.status
        rec.reduced_pairs = res.reduced_size
        if res.status != OPTIMAL:
            stats.time_limited += 1
        if res.cost < cur_cost - COST_TOL:
            rec.delta = res.cost - cur_cost
            t, cur_cost = res.tour, res.cost
    return t


def polish(inst, t: Tour, cfg: PolishConfig | None = None,
           opts: SolveOptions | None = None):
    """Run ``cfg.passes`` polishing passes; returns ``(tour, PolishStats)``.

    Every circle keeps the incumbent unless the exact reconnection is cheaper,
    so the cost never increases.
    """
    cfg = cfg or PolishConfig()
    opts = opts or SolveOptions(time_limit=DEFAULT_CIRCLE_TIME)
    r_r, n_stp = cfg.resolve(inst.n, inst.area)
    stats = PolishStats(radius=r_r, n_stp=n_stp)
    for _ in range(cfg.passes):
        t0 = time.perf_counter()
        t = polish_pass(inst, t, r_r, n_stp, opts, stats, cfg.centers)
        stats.pass_times.append(time.perf_counter() - t0)
        stats.pass_costs.append(tour_cost(inst, t))
    return t, stats


__all__ = [
    "CircleRecord",
    "PolishConfig",
    "PolishStats",
    "adaptive_radius",
    "expected_count",
    "polish",
    "polish_pass",
    "select_in_circle",
    "step_length",
]
