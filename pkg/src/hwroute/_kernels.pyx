# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the routines in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline bint _leq(double a, double b, double tol) nogil:
    cdef double m = fabs(a)
    if fabs(b) > m:
        m = fabs(b)
    return a <= b + tol * m


cdef void _sift_up(double* hk, i64* hv, i64 i) nogil:
    cdef i64 p
    cdef double tk
    cdef i64 tv
    while i > 0:
        p = (i - 1) >> 1
        if hk[p] < hk[i] or (hk[p] == hk[i] and hv[p] <= hv[i]):
            break
        tk = hk[p]; hk[p] = hk[i]; hk[i] = tk
        tv = hv[p]; hv[p] = hv[i]; hv[i] = tv
        i = p


cdef void _sift_down(double* hk, i64* hv, i64 size, i64 i) nogil:
    cdef i64 l, r, s
    cdef double tk
    cdef i64 tv
    while True:
        l = 2 * i + 1
        r = l + 1
        s = i
        if l < size and (hk[l] < hk[s] or (hk[l] == hk[s] and hv[l] < hv[s])):
            s = l
        if r < size and (hk[r] < hk[s] or (hk[r] == hk[s] and hv[r] < hv[s])):
            s = r
        if s == i:
            break
        tk = hk[s]; hk[s] = hk[i]; hk[i] = tk
        tv = hv[s]; hv[s] = hv[i]; hv[i] = tv
        i = s


def apsp(i64 n, indptr, indices, weights, double tol):
    cdef i64[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[:] wt = np.ascontiguousarray(weights, dtype=np.float64)
    dist_a = np.full((n, n), np.inf)
    pred_a = np.full((n, n), -1, dtype=np.int64)
    cdef double[:, :] dist = dist_a
    cdef i64[:, :] pred = pred_a
    cdef i64 m = ip[n]
    cdef double* hk = <double*> malloc((m + n + 1) * sizeof(double))
    cdef i64* hv = <i64*> malloc((m + n + 1) * sizeof(i64))
    cdef char* done = <char*> malloc(n * sizeof(char))
    cdef i64 s, u, v, k, w, size, best
    cdef double du, nd
    try:
        for s in range(n):
            for v in range(n):
                done[v] = 0
            dist[s, s] = 0.0
            size = 1
            hk[0] = 0.0
            hv[0] = s
            while size > 0:
                du = hk[0]
                u = hv[0]
                size -= 1
                hk[0] = hk[size]
                hv[0] = hv[size]
                _sift_down(hk, hv, size, 0)
                if done[u]:
                    continue
                done[u] = 1
                for k in range(ip[u], ip[u + 1]):
                    v = ix[k]
                    nd = du + wt[k]
                    if nd < dist[s, v]:
                        dist[s, v] = nd
                        hk[size] = nd
                        hv[size] = v
                        size += 1
                        _sift_up(hk, hv, size - 1)
            for v in range(n):
                if v == s or dist[s, v] == INFINITY:
                    continue
                best = -1
                for k in range(ip[v], ip[v + 1]):
                    w = ix[k]
                    if dist[s, w] != INFINITY and _leq(dist[s, w] + wt[k], dist[s, v], tol):
                        if best < 0 or w < best:
                            best = w
                pred[s, v] = best
    finally:
        free(hk)
        free(hv)
        free(done)
    return dist_a, pred_a


def collect_paths(pred_in, us_in, vs_in):
    cdef i64[:, :] pred = np.ascontiguousarray(pred_in, dtype=np.int64)
    cdef i64[:] us = np.ascontiguousarray(us_in, dtype=np.int64)
    cdef i64[:] vs = np.ascontiguousarray(vs_in, dtype=np.int64)
    cdef i64 m = us.shape[0]
    cdef i64 i, u, x, total = 0, length, pos, j
    ptr_a = np.zeros(m + 1, dtype=np.int64)
    cdef i64[:] ptr = ptr_a
    for i in range(m):
        u = us[i]
        x = vs[i]
        length = 1
        while x != u:
            x = pred[u, x]
            length += 1
        total += length
        ptr[i + 1] = total
    verts_a = np.empty(total, dtype=np.int64)
    cdef i64[:] verts = verts_a
    for i in range(m):
        u = us[i]
        x = vs[i]
        pos = ptr[i + 1] - 1
        verts[pos] = x
        while x != u:
            x = pred[u, x]
            pos -= 1
            verts[pos] = x
    return ptr_a, verts_a


def greedy_hitting_set(i64 n, ptr_in, verts_in):
    cdef i64[:] ptr = np.ascontiguousarray(ptr_in, dtype=np.int64)
    cdef i64[:] verts = np.ascontiguousarray(verts_in, dtype=np.int64)
    cdef i64 m = ptr.shape[0] - 1
    if m <= 0:
        return []
    cdef i64 total = ptr[m]
    inc_ptr_a = np.zeros(n + 1, dtype=np.int64)
    cdef i64[:] inc_ptr = inc_ptr_a
    cdef i64 p, k, v, best, best_c, h
    for k in range(total):
        inc_ptr[verts[k] + 1] += 1
    for v in range(n):
        inc_ptr[v + 1] += inc_ptr[v]
    inc_a = np.empty(total, dtype=np.int64)
    cdef i64[:] inc = inc_a
    fill_a = inc_ptr_a[:n].copy()
    cdef i64[:] fill = fill_a
    for p in range(m):
        for k in range(ptr[p], ptr[p + 1]):
            v = verts[k]
            inc[fill[v]] = p
            fill[v] += 1
    count_a = np.diff(inc_ptr_a)
    cdef i64[:] count = count_a
    covered_a = np.zeros(m, dtype=np.int8)
    cdef cnp.int8_t[:] covered = covered_a
    hubs = []
    while True:
        best = -1
        best_c = 0
        for v in range(n):
            if count[v] > best_c:
                best = v
                best_c = count[v]
        if best < 0:
            break
        hubs.append(best)
        for k in range(inc_ptr[best], inc_ptr[best + 1]):
            p = inc[k]
            if covered[p]:
                continue
            covered[p] = 1
            for h in range(ptr[p], ptr[p + 1]):
                count[verts[h]] -= 1
    hits_a = np.zeros(m, dtype=np.int64)
    cdef i64[:] hits = hits_a
    for h in hubs:
        for k in range(inc_ptr[h], inc_ptr[h + 1]):
            hits[inc[k]] += 1
    kept = set(hubs)
    cdef bint redundant
    for h in sorted(hubs, reverse=True):
        redundant = True
        for k in range(inc_ptr[h], inc_ptr[h + 1]):
            if hits[inc[k]] < 2:
                redundant = False
                break
        if redundant:
            kept.discard(h)
            for k in range(inc_ptr[h], inc_ptr[h + 1]):
                hits[inc[k]] -= 1
    return sorted(kept)
