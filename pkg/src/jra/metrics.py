"""Deviation, edge-difference and neighbourhood-size statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tour import edge_difference, edges_of

EXACT_LIMIT = 64


def deviation_pct(candidate: float, reference: float) -> float:
    """Percent excess of ``candidate`` over ``reference``."""
    if not reference > 0:
        raise ValueError(f"reference cost must be positive, got {reference}")
    return 100.0 * (candidate - reference) / reference


def format_deviation(pct: float) -> str:
    """Table style, e.g. ``(+1.086%)``."""
    v = round(pct, 3)
    if v == 0:
        v = 0.0  # no "-0.000"
    return f"({v:+.3f}%)"


def n_d(tour_a, tour_b) -> int:
    """Edge symmetric difference between two tours."""
    return edge_difference(edges_of(tour_a), edges_of(tour_b))


def kopt_move_types(k: int) -> int:
    """MT(k) = 2^(k-1) (k-1)!, the number of k-opt reconnection types."""
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    k = int(k)
    return 2 ** (k - 1) * math.factorial(k - 1)


@dataclass(frozen=True)
class Neighbourhood:
    """Size of the exchange neighbourhood; ``exact`` is None past the cut-off."""

    n: int
    alpha: float
    k_max: int
    exact: int | None
    log10: float

    def __str__(self):
        if self.exact is not None:
            return str(self.exact)
        return f"~1e{self.log10:.2f}"


def _kmax(n: int, alpha: float) -> int:
    v = 2 * n * alpha
    r = round(v)
    return int(r) if abs(v - r) < 1e-9 else math.floor(v)


def large_alpha_neighborhood(n: int, alpha: float) -> Neighbourhood:
    """N_total = sum_{k=2}^{2n alpha} C(2n, k) MT(k).

    Exact while 2n alpha <= 64. Past that only a base-10 magnitude is given,
    using C(2n, k) ~ (2n)^k / k!, so the terms become (2n)^k 2^(k-1) / k.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    k_max = _kmax(n, alpha)
    if k_max < 2:
        return Neighbourhood(n, alpha, k_max, 0, -math.inf)
    if k_max <= EXACT_LIMIT:
        total = sum(math.comb(2 * n, k) * kopt_move_types(k) for k in range(2, k_max + 1))
        return Neighbourhood(n, alpha, k_max, total, math.log10(total))
    logs = [
        k * math.log10(2 * n) + (k - 1) * math.log10(2) - math.log10(k)
        for k in range(2, k_max + 1)
    ]
    top = max(logs)
    mag = top + math.log10(sum(10 ** (v - top) for v in logs))
    return Neighbourhood(n, alpha, k_max, None, mag)


def cycle_ratio_stats(instances, cycle_sets, collectors=None) -> dict:
    """Mean cycles/n and, given merge collectors, mean collected fraction of 2n+2."""
    if len(instances) != len(cycle_sets):
        raise ValueError(
            f"{len(instances)} instances but {len(cycle_sets)} cycle sets"
        )
    if collectors is not None and len(collectors) != len(instances):
        raise ValueError(
            f"{len(instances)} instances but {len(collectors)} collectors"
        )
    if not instances:
        raise ValueError("no instances given")
    ratios = [len(cs) / inst.n for inst, cs in zip(instances, cycle_sets)]
    out = {"mean_ratio": sum(ratios) / len(ratios), "ratios": ratios}
    if collectors is not None:
        fr = [len(c) / (2 * inst.n + 2) for inst, c in zip(instances, collectors)]
        out["mean_node_fraction"] = sum(fr) / len(fr)
        out["node_fractions"] = fr
    return out
