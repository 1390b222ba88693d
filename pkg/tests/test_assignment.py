import itertools

import numpy as np
import pytest

from jra.assignment import AssignmentInfeasible, detect_cycles, hungarian, two_way_assign
from jra.instance import generate
from jra.tour import edges_of
from oracles import lap_brute


def test_hungarian_doc_example():
    assert hungarian([[1, 2], [3, 1]]) == ([0, 1], 2.0)


@pytest.mark.parametrize("n", [1, 3, 5, 6])
def test_hungarian_matches_enumeration(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        C = rng.random((n, n))
        perm, total = hungarian(C)
        assert sorted(perm) == list(range(n))
        assert total == pytest.approx(lap_brute(C), abs=1e-12)


def test_hungarian_integer_ties():
    rng = np.random.default_rng(0)
    for _ in range(20):
        C = rng.integers(0, 3, size=(5, 5)).astype(float)
        assert hungarian(C)[1] == lap_brute(C)


def test_hungarian_rejects_bad_input():
    with pytest.raises(ValueError):
        hungarian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        hungarian([[np.nan, 1], [1, 1]])
    with pytest.raises(AssignmentInfeasible):
        hungarian([[np.inf, np.inf], [1, 1]])
    assert hungarian(np.zeros((0, 0))) == ([], 0.0)


def _best_perm(C, allowed):
    n = len(C)
    best = np.inf
    for perm in itertools.permutations(range(n)):
        if all(allowed[r, perm[r]] for r in range(n)):
            best = min(best, sum(C[r, perm[r]] for r in range(n)))
    return best


@pytest.mark.parametrize("fixed", [True, False])
@pytest.mark.parametrize("seed", range(6))
def test_two_way_passes_are_optimal(seed, fixed):
    n = 6
    inst = generate(n, seed, fixed_pair=fixed)
    C = inst.cost_matrix()
    cs, fwd, bwd = two_way_assign(inst, return_passes=True)
    allowed = np.ones((n, n), dtype=bool)
    if fixed:
        allowed[n - 1, :] = False
        allowed[:, n - 1] = False
        allowed[n - 1, n - 1] = True
        assert (n, 2 * n) in fwd
    f_cost = sum(C[i - 1, p - n - 1] for i, p in fwd)
    assert f_cost == pytest.approx(_best_perm(C, allowed))
    allowed_b = np.ones((n, n), dtype=bool)
    for i, p in fwd:
        allowed_b[i - 1, p - n - 1] = False
    b_cost = sum(C[i - 1, p - n - 1] for i, p in bwd)
    assert b_cost == pytest.approx(_best_perm(C, allowed_b))
    assert not fwd & bwd
    assert cs.edges() == fwd | bwd


@pytest.mark.parametrize("seed", range(10))
def test_cycle_set_partitions_nodes(seed):
    inst = generate(40, seed)
    cs = two_way_assign(inst)
    seen = []
    for c in cs.cycles:
        seen.extend(c.q_I)
        seen.extend(c.q_P)
        assert len(c.q_I) >= 2  # a simple bipartite cycle has >= 2 pairs
    assert sorted(seen) == list(range(1, 81))
    assert len(cs.edges()) == 80
    assert sorted(cs.nodes()) == list(range(1, 81))


def test_detect_cycles_order():
    from jra.tour import Tour

    a = edges_of(Tour([3, 4], [7, 8]))
    b = edges_of(Tour([1, 2], [6, 5]))
    cs = detect_cycles(a | b, 4)
    assert [c.q_I[0] for c in cs.cycles] == [1, 3]
    assert cs.cycles[0].q_P[0] == 5
