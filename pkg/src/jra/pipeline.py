"""End-to-end workflow: assignment, merging, PPR merge, polishing, Large-alpha."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from .assignment import two_way_assign
from .exact import OPTIMAL, TIME_LIMIT, SolveOptions, solve_large_alpha
from .merging import merge_cycles
from .metrics import deviation_pct, n_d
from .ppr import refine_merge
from .slppr import DEFAULT_CIRCLE_TIME, PolishConfig, PolishStats, polish_pass
from .tour import COST_TOL, Tour, tour_cost

log = logging.getLogger(__name__)


@dataclass
class Stage:
    name: str
    cost: float
    wall_time: float
    deviation_pct: float | None = None
    n_d: int | None = None
    status: str = OPTIMAL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cost": self.cost,
            "deviation_pct": self.deviation_pct,
            "wall_time": self.wall_time,
            "N_d": self.n_d,
            "status": self.status,
        }


@dataclass
class PipelineReport:
    instance: dict
    config: dict
    stages: list = field(default_factory=list)
    complete: bool = True
    error: str | None = None
    polish: dict | None = None

    @property
    def final_cost(self) -> float:
        return self.stages[-1].cost

    @property
    def time_limited(self) -> bool:
        return any(s.status != OPTIMAL for s in self.stages)

    def stage(self, name: str) -> Stage | None:
        for s in self.stages:
            if s.name == name:
                return s
        return None

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "config": self.config,
            "complete": self.complete,
            "error": self.error,
            "stages": [s.to_dict() for s in self.stages],
            "polish": self.polish,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class Reference:
    """Known-good solution for deviation and N_d columns; the tour is optional."""

    cost: float
    tour: Tour | None = None


def run_pipeline(inst, cfg: PolishConfig | None = None, alpha: float = 0.15,
                 opts: SolveOptions | None = None, use_ppr_merge: bool = True,
                 reference: Reference | None = None):
    """Run every stage in order; returns ``(tour, PipelineReport)``.

    ``opts.time_limit`` bounds the PPR merge and Large-alpha solves; polishing
    circles use their own shorter limit. A failing stage stops the run with
    the last valid tour and ``report.complete = False``.
    """
    cfg = cfg or PolishConfig()
    opts = opts or SolveOptions()
    report = PipelineReport(
        instance={"n": inst.n, "area": inst.area, "fixed_pair": inst.fixed_pair},
        config={
            "alpha": alpha,
            "radius": cfg.radius,
            "n_stp": cfg.n_stp,
            "passes": cfg.passes,
            "target_nodes": cfg.target_nodes,
            "use_ppr_merge": use_ppr_merge,
            "time_limit": opts.time_limit,
        },
    )

    def record(name, t, dt, status=OPTIMAL, cost=None):
        c = tour_cost(inst, t) if cost is None else cost
        st = Stage(name, c, dt, status=status)
        if reference is not None:
            st.deviation_pct = deviation_pct(c, reference.cost)
            if reference.tour is not None:
                st.n_d = n_d(t, reference.tour)
        report.stages.append(st)
        log.info("%s: %.6f (%.3f s)", name, c, dt)

    tour = None
    stage = "merge"
    try:
        t0 = time.perf_counter()
        tour, collector = merge_cycles(inst, two_way_assign(inst))
        record("merge", tour, time.perf_counter() - t0)

        if use_ppr_merge:
            stage = "ppr-merge"
            t0 = time.perf_counter()
            res = refine_merge(inst, tour, collector, opts, return_result=True)
            tour = res.tour
            record("ppr-merge", tour, time.perf_counter() - t0, res.status, res.cost)

        stage = "polish"
        circle_opts = SolveOptions(
            time_limit=min(DEFAULT_CIRCLE_TIME, opts.time_limit or DEFAULT_CIRCLE_TIME)
        )
        r_r, n_stp = cfg.resolve(inst.n, inst.area)
        stats = PolishStats(radius=r_r, n_stp=n_stp)
        report.config["effective_radius"] = r_r
        report.config["effective_n_stp"] = n_stp
        for k in range(1, cfg.passes + 1):
            t0 = time.perf_counter()
            limited = stats.time_limited
            tour = polish_pass(inst, tour, r_r, n_stp, circle_opts, stats, cfg.centers)
            dt = time.perf_counter() - t0
            stats.pass_times.append(dt)
            stats.pass_costs.append(tour_cost(inst, tour))
            status = OPTIMAL if stats.time_limited == limited else TIME_LIMIT
            record(f"polish{k}", tour, dt, status)
        report.polish = stats.to_dict()

        stage = "large-alpha"
        t0 = time.perf_counter()
        res = solve_large_alpha(inst, tour, alpha, opts)
        if res.edges and res.cost < tour_cost(inst, tour) - COST_TOL:
            tour = res.tour
        record("large-alpha", tour, time.perf_counter() - t0, res.status)
    except Exception as exc:  # noqa: BLE001 - report and hand back the last tour
        log.error("stage %s failed: %s", stage, exc)
        report.complete = False
        report.error = f"{stage}: {type(exc).__name__}: {exc}"
        if tour is None:
            raise
    return tour, report
