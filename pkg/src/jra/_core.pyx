# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Hungarian assignment and simple bipartite b-matching.

Behaviour (including tie-breaking) matches ``jra._core_py`` exactly.
"""

import numpy as np
cimport numpy as cnp

from libc.math cimport INFINITY

cnp.import_array()


def lap(cost):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef double[::1] u = np.zeros(n + 1)
    cdef double[::1] v = np.zeros(n + 1)
    cdef double[::1] minv = np.empty(n + 1)
    cdef cnp.int64_t[::1] row_of_col = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] way = np.zeros(n + 1, dtype=np.int64)
    cdef unsigned char[::1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur
    out = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] col_of_row = out
    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = row_of_col[j0]
            delta = INFINITY
            j1 = -1
            for j in range(1, n + 1):
                if not used[j]:
                    cur = c[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            if delta == INFINITY:
                return out, False
            for j in range(n + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    return out, True


def two_factor(cost, avail, b_item, b_place):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef unsigned char[:, ::1] av = np.ascontiguousarray(avail, dtype=np.uint8)
    cdef cnp.int64_t[::1] bi = np.ascontiguousarray(b_item, dtype=np.int64)
    cdef cnp.int64_t[::1] bp = np.ascontiguousarray(b_place, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    x_arr = np.zeros((n, n), dtype=np.uint8)
    pi_arr = np.zeros(n)
    pp_arr = np.zeros(n)
    cdef unsigned char[:, ::1] x = x_arr
    cdef double[::1] pot_i = pi_arr
    cdef double[::1] pot_p = pp_arr
    cdef double[::1] dist_i = np.empty(n)
    cdef double[::1] dist_p = np.empty(n)
    cdef unsigned char[::1] done_i = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] done_p = np.empty(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] pred_i = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] pred_p = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] flow_i = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] flow_p = np.zeros(n, dtype=np.int64)
    # placeholders' selected items (degree <= 2 in use, but b may exceed 2)
    cdef Py_ssize_t total = 0, total_p = 0
    cdef Py_ssize_t i, p, q, a, b, it
    cdef double pot_t, pot_s = 0.0, dist_t, da, db, nd, m
    cdef Py_ssize_t pred_t
    for i in range(n):
        total += bi[i]
        total_p += bp[i]
    if total != total_p:
        return x_arr, pi_arr, pp_arr, False
    pot_t = INFINITY
    for p in range(n):
        m = INFINITY
        for i in range(n):
            if av[i, p] and c[i, p] < m:
                m = c[i, p]
        pot_p[p] = m if m < INFINITY else 0.0
        if pot_p[p] < pot_t:
            pot_t = pot_p[p]
    if n == 0:
        pot_t = 0.0
    for it in range(total):
        for i in range(n):
            dist_i[i] = INFINITY
            dist_p[i] = INFINITY
            done_i[i] = 0
            done_p[i] = 0
            pred_i[i] = -1
            pred_p[i] = -1
            if flow_i[i] < bi[i]:
                dist_i[i] = pot_s - pot_i[i]
        dist_t = INFINITY
        pred_t = -1
        while True:
            a = -1
            da = INFINITY
            for i in range(n):
                if not done_i[i] and dist_i[i] < da:
                    da = dist_i[i]
                    a = i
            b = -1
            db = INFINITY
            for p in range(n):
                if not done_p[p] and dist_p[p] < db:
                    db = dist_p[p]
                    b = p
            if dist_t <= da and dist_t <= db:
                break
            if a < 0 and b < 0:
                break
            if da <= db:
                done_i[a] = 1
                for p in range(n):
                    if av[a, p] and not x[a, p] and not done_p[p]:
                        nd = da + c[a, p] + pot_i[a] - pot_p[p]
                        if nd < dist_p[p]:
                            dist_p[p] = nd
                            pred_p[p] = a
            else:
                done_p[b] = 1
                if flow_p[b] < bp[b]:
                    nd = db + pot_p[b] - pot_t
                    if nd < dist_t:
                        dist_t = nd
                        pred_t = b
                for i in range(n):
                    if x[i, b] and not done_i[i]:
                        nd = db - c[i, b] + pot_p[b] - pot_i[i]
                        if nd < dist_i[i]:
                            dist_i[i] = nd
                            pred_i[i] = b
        if dist_t == INFINITY:
            return x_arr, pi_arr, pp_arr, False
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
        for i in range(n):
            pot_i[i] += dist_i[i] if dist_i[i] < dist_t else dist_t
            pot_p[i] += dist_p[i] if dist_p[i] < dist_t else dist_t
        pot_t += dist_t
    return x_arr, pi_arr, pp_arr, True
