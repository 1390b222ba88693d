import json
import math

import numpy as np
import pytest

from jra.assignment import two_way_assign
from jra.instance import generate
from jra.merging import merge_cycles
from jra.slppr import (
    PolishConfig,
    adaptive_radius,
    expected_count,
    polish,
    select_in_circle,
    step_length,
)
from jra.tour import tour_cost, validate


def merged(n, seed):
    inst = generate(n, seed)
    t, _ = merge_cycles(inst, two_way_assign(inst))
    return inst, t


def test_select_matches_direct_scan():
    inst = generate(100, 3)
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = rng.random(2)
        r = float(rng.uniform(0.05, 0.4))
        want = {v for v in range(1, 201) if math.dist(inst.coord(v), c) <= r}
        assert select_in_circle(inst, c, r) == want


def test_select_includes_boundary():
    inst = generate(3, 0)
    x, y = inst.coord(2)
    assert 2 in select_in_circle(inst, (x + 0.25, y), 0.25)


def test_adaptive_radius_values_and_scaling():
    assert adaptive_radius(1000, 1.0, 40) == pytest.approx(0.11284, abs=1e-5)
    r = adaptive_radius(300, 1.0, 12)
    assert expected_count(300, 1.0, r) == pytest.approx(12)
    assert adaptive_radius(1200, 1.0, 12) == pytest.approx(r / 2)
    assert adaptive_radius(300, 4.0, 12) == pytest.approx(2 * r)
    assert adaptive_radius(300, 1.0, 48) == pytest.approx(2 * r)
    with pytest.raises(ValueError):
        adaptive_radius(0, 1.0, 10)


def test_step_length():
    d = math.sqrt(1 / 400)
    assert step_length(3 * d, 400, 1.0, 0.5) == 3
    assert step_length(6 * d, 400, 1.0, 0.5) == 6
    assert step_length(1e-6, 400, 1.0, 0.5) == 1
    cfg = PolishConfig(target_nodes=12, kappa=0.5)
    r, stp = cfg.resolve(400)
    assert r == pytest.approx(adaptive_radius(400, 1.0, 12))
    assert stp == step_length(r, 400, 1.0, 0.5)


def test_config_validation():
    for bad in (dict(radius=0), dict(radius=float("nan")), dict(n_stp=0), dict(passes=0),
                dict(n_stp=1.5)):
        with pytest.raises(ValueError):
            PolishConfig(**bad)
    assert PolishConfig(eta=3).eta == 3


def test_tiny_radius_is_noop():
    inst, t = merged(30, 1)
    out, stats = polish(inst, t, PolishConfig(radius=1e-9, passes=1))
    assert out == t
    assert stats.skipped == len(stats.circles) > 0


def test_polish_monotone_over_seeds():
    for seed in range(50):
        inst, t = merged(40, seed)
        base = tour_cost(inst, t)
        out, stats = polish(inst, t, PolishConfig(radius=0.2, n_stp=3, passes=2))
        validate(out, 40, True)
        costs = [base] + stats.pass_costs
        assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:]))
        assert tour_cost(inst, out) == pytest.approx(costs[-1])
        assert all(c.delta <= 0 for c in stats.circles)


def test_waypoint_count():
    inst, t = merged(30, 2)
    _, stats = polish(inst, t, PolishConfig(radius=0.15, n_stp=4, passes=2))
    assert len(stats.circles) == 2 * math.ceil(30 / 4)
    # the first waypoint of each pass sits on the fixed-pair item
    assert stats.circles[0].center == tuple(inst.coord(30))


def test_manual_centers_and_stats_json():
    inst, t = merged(25, 4)
    cfg = PolishConfig(radius=0.3, passes=1, centers=[(0.5, 0.5), (0.2, 0.8)])
    _, stats = polish(inst, t, cfg)
    assert [c.center for c in stats.circles] == [(0.5, 0.5), (0.2, 0.8)]
    d = json.loads(stats.dumps())
    assert set(d["circles"][0]) == {"center", "|V_r|", "delta", "time", "status", "reduced_pairs"}
    assert d["radius"] == 0.3 and len(d["pass_costs"]) == 1
