"""Independent brute-force references. Nothing here imports the solver code."""

import itertools
import math

import numpy as np


def lap_brute(C):
    """Minimum over all permutations, exhaustively."""
    n = len(C)
    best = math.inf
    rows = np.arange(n)
    for perm in itertools.permutations(range(n)):
        v = C[rows, list(perm)].sum()
        if v < best:
            best = v
    return float(best)


def _placeholder_perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def tours_brute(C, fixed_pair=True, forced=(), must_keep=None, keep_min=0,
                keep_exact=False, forbidden=()):
    """Cheapest alternating Hamiltonian cycle by full enumeration.

    ``C[i, p]`` with 0-based item/placeholder indices. Item 0 is pinned to
    the first slot; every cyclic order of the remaining items is combined
    with every placeholder order, which lists each cycle exactly twice (once
    per direction). ``forced`` holds 0-based (i, p) cells that must be used;
    ``must_keep`` a set of cells of which at least ``keep_min`` are used
    (exactly ``keep_min`` with ``keep_exact``); ``forbidden`` cells are unusable.

    Returns ``(cost, count)``: the minimum and the number of distinct cycles
    enumerated (directions counted once).
    """
    n = len(C)
    P = _placeholder_perms(n)
    best = math.inf
    seen = 0
    keep = None
    if must_keep is not None:
        keep = np.zeros((n, n), dtype=bool)
        for i, p in must_keep:
            keep[i, p] = True
    for rest in itertools.permutations(range(1, n)):
        q = (0,) + rest
        nxt = q[1:] + q[:1]
        # placeholder in slot k sits between items q[k] and q[k+1]
        A = C[list(q), :] + C[list(nxt), :]  # slot k cost for each placeholder
        cost = A[np.arange(n), P].sum(axis=1)
        ok = np.ones(len(P), dtype=bool)
        qa = np.array(q)
        qb = np.array(nxt)
        cells = []
        if fixed_pair:
            cells.append((n - 1, n - 1))
        cells.extend(forced)
        for i, p in cells:
            slot = np.argmax(P == p, axis=1)
            ok &= (qa[slot] == i) | (qb[slot] == i)
        if keep is not None:
            hits = keep[qa[None, :], P].sum(axis=1) + keep[qb[None, :], P].sum(axis=1)
            ok &= (hits == keep_min) if keep_exact else (hits >= keep_min)
        for i, p in forbidden:
            slot = np.argmax(P == p, axis=1)
            ok &= (qa[slot] != i) & (qb[slot] != i)
        seen += int(ok.sum())
        if ok.any():
            best = min(best, float(cost[ok].min()))
    return best, seen // 2


def tour_count(n):
    """Number of alternating Hamiltonian cycles on n + n nodes (n >= 2)."""
    return math.factorial(n) * math.factorial(n - 1) // 2
