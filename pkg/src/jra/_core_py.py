"""Pure-Python (numpy) versions of the hot kernels.

These mirror ``jra._core`` exactly, including tie-breaking, and are used when
the compiled extension is unavailable.
"""

import numpy as np

INF = float("inf")


def lap(cost):
    """Minimum-cost perfect assignment on a square matrix.

    Shortest augmenting path Hungarian method, O(n^3). Forbidden cells are
    ``inf``. Ties are resolved toward the lowest column index.

    Returns ``(col_of_row, ok)``; ``ok`` is False when no finite perfect
    assignment exists.
    """
    c = np.asarray(cost, dtype=np.float64)
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of_col = np.zeros(n + 1, dtype=np.int64)  # 1-based rows, 0 = free
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        minv = np.full(n + 1, INF)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            cur = c[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], INF)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            if delta == INF:
                return np.full(n, -1, dtype=np.int64), False
            u[row_of_col[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    return col_of_row, True


def two_factor(cost, avail, b_item, b_place):
    """Minimum-cost simple bipartite b-matching (a 2-factor when b = 2).

    ``cost[i, p]`` is used only where ``avail[i, p]`` is true; each selected
    cell has multiplicity one. Items need degree ``b_item[i]`` and
    placeholders ``b_place[p]``.

    Successive shortest paths with Dijkstra on reduced costs. Returns
    ``(x, pot_item, pot_place, ok)`` where ``x`` is the 0/1 selection and the
    potentials give reduced costs ``cost + pot_item[:, None] - pot_place`` that
    are >= 0 on unselected and <= 0 on selected available cells.
    """
    c = np.asarray(cost, dtype=np.float64)
    av = np.asarray(avail, dtype=bool)
    n = c.shape[0]
    bi = np.asarray(b_item, dtype=np.int64)
    bp = np.asarray(b_place, dtype=np.int64)
    x = np.zeros((n, n), dtype=np.uint8)
    total = int(bi.sum())
    if total != int(bp.sum()):
        return x, np.zeros(n), np.zeros(n), False
    cm = np.where(av, c, INF)
    pot_i = np.zeros(n)
    col_min = cm.min(axis=0) if n else np.zeros(0)
    pot_p = np.where(np.isfinite(col_min), col_min, 0.0)
    # pot_p[p] >= pot_t keeps the p -> t arcs nonnegative
    pot_t = float(pot_p.min()) if n else 0.0
    pot_s = 0.0
    flow_i = np.zeros(n, dtype=np.int64)
    flow_p = np.zeros(n, dtype=np.int64)
    for _ in range(total):
        dist_i = np.full(n, INF)
        dist_p = np.full(n, INF)
        done_i = np.zeros(n, dtype=bool)
        done_p = np.zeros(n, dtype=bool)
        pred_i = np.full(n, -1, dtype=np.int64)  # placeholder feeding item (-1: source)
        pred_p = np.full(n, -1, dtype=np.int64)  # item feeding placeholder
        src = flow_i < bi
        dist_i[src] = pot_s - pot_i[src]
        dist_t = INF
        pred_t = -1
        while True:
            cand_i = np.where(done_i, INF, dist_i)
            cand_p = np.where(done_p, INF, dist_p)
            a = int(np.argmin(cand_i))
            b = int(np.argmin(cand_p))
            da, db = cand_i[a], cand_p[b]
            if dist_t <= da and dist_t <= db:
                break
            if da == INF and db == INF:
                break
            if da <= db:
                done_i[a] = True
                row = x[a] == 0
                nd = da + cm[a] + pot_i[a] - pot_p
                upd = row & ~done_p & (nd < dist_p)
                dist_p[upd] = nd[upd]
                pred_p[upd] = a
            else:
                done_p[b] = True
                if flow_p[b] < bp[b]:
                    nd = db + pot_p[b] - pot_t
                    if nd < dist_t:
                        dist_t = nd
                        pred_t = b
                col = np.nonzero(x[:, b])[0]
                for i in col:
                    if done_i[i]:
                        continue
                    nd = db - cm[i, b] + pot_p[b] - pot_i[i]
                    if nd < dist_i[i]:
                        dist_i[i] = nd
                        pred_i[i] = b
        if dist_t == INF:
            return x, pot_i, pot_p, False
        p = pred_t
        flow_p[p] += 1
        while True:
            i = pred_p[p]
            x[i, p] = 1
            q = pred_i[i]
            if q < 0:
                flow_i[i] += 1
                break
            x[i, q] = 0
            p = q
        pot_i += np.minimum(dist_i, dist_t)
        pot_p += np.minimum(dist_p, dist_t)
        pot_t += dist_t
    return x, pot_i, pot_p, True
