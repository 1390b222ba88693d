import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, linear_sum_assignment, milp

from jra import _core_py, kernels

BACKENDS = kernels.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    prev = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(prev)


def b_matching_ref(C, avail, bi, bp):
    n = len(C)
    A = []
    lo = []
    hi = []
    for i in range(n):
        r = np.zeros((n, n))
        r[i, :] = 1
        A.append(r.ravel())
        lo.append(bi[i])
        hi.append(bi[i])
    for p in range(n):
        r = np.zeros((n, n))
        r[:, p] = 1
        A.append(r.ravel())
        lo.append(bp[p])
        hi.append(bp[p])
    ub = avail.ravel().astype(float)
    c = np.where(avail, C, 0.0).ravel()
    res = milp(c, constraints=LinearConstraint(np.array(A), lo, hi),
               integrality=np.ones(n * n), bounds=Bounds(0, ub))
    return res.fun if res.success else None


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_lap_matches_scipy(backend, n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        C = rng.random((n, n))
        col, ok = kernels.lap(C)
        assert ok
        assert sorted(col) == list(range(n))
        r, c = linear_sum_assignment(C)
        assert C[np.arange(n), col].sum() == pytest.approx(C[r, c].sum(), abs=1e-12)


def test_lap_forbidden_cells(backend):
    C = np.array([[np.inf, 1.0], [np.inf, 2.0]])
    _, ok = kernels.lap(C)
    assert not ok
    C = np.array([[np.inf, 1.0], [5.0, np.inf]])
    col, ok = kernels.lap(C)
    assert ok and list(col) == [1, 0]


def test_lap_ties_go_to_lowest_column(backend):
    col, ok = kernels.lap(np.zeros((4, 4)))
    assert ok and list(col) == [0, 1, 2, 3]


@pytest.mark.parametrize("n", [2, 3, 6, 12, 25])
def test_two_factor_matches_milp(backend, n):
    rng = np.random.default_rng(100 + n)
    for trial in range(4):
        C = rng.random((n, n))
        avail = rng.random((n, n)) > (0.2 if n > 3 else 0.0)
        b = np.full(n, 2)
        if n == 2:
            b = np.full(n, 2)
            avail[:] = True
        x, pi, pp, ok = kernels.two_factor(C, avail, b, b)
        ref = b_matching_ref(C, avail, b, b)
        if ref is None:
            assert not ok
            continue
        assert ok
        assert (x.sum(0) == 2).all() and (x.sum(1) == 2).all()
        assert not (x.astype(bool) & ~avail).any()
        assert C[x.astype(bool)].sum() == pytest.approx(ref, abs=1e-9)
        # reduced-cost optimality certificate on available cells
        rc = C + pi[:, None] - pp[None, :]
        assert (rc[avail & (x == 0)] >= -1e-9).all()
        assert (rc[avail & (x == 1)] <= 1e-9).all()


def test_two_factor_mixed_degrees(backend):
    rng = np.random.default_rng(7)
    n = 8
    C = rng.random((n, n))
    avail = np.ones((n, n), dtype=bool)
    bi = np.array([2, 1, 2, 0, 2, 1, 2, 2])
    bp = np.array([1, 2, 2, 2, 1, 2, 2, 0])
    x, _, _, ok = kernels.two_factor(C, avail, bi, bp)
    assert ok
    assert list(x.sum(1)) == list(bi) and list(x.sum(0)) == list(bp)
    assert C[x.astype(bool)].sum() == pytest.approx(b_matching_ref(C, avail, bi, bp), abs=1e-9)


def test_two_factor_unbalanced_degrees_rejected(backend):
    _, _, _, ok = kernels.two_factor(np.ones((2, 2)), np.ones((2, 2), bool), [2, 2], [2, 1])
    assert not ok


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree_exactly():
    from jra import _core

    rng = np.random.default_rng(3)
    for n in (5, 13, 30):
        C = np.round(rng.random((n, n)) * 10) / 10  # plenty of ties
        avail = rng.random((n, n)) > 0.1
        b = np.full(n, 2)
        a = _core.two_factor(C, avail, b, b)
        p = _core_py.two_factor(C, avail, b, b)
        assert a[3] == p[3]
        if a[3]:
            assert np.array_equal(a[0], p[0])
        assert np.array_equal(_core.lap(C)[0], _core_py.lap(C)[0])


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
