"""Pure-Python kernels: the fallback used when the compiled extension is absent.

Every function here has a byte-for-byte twin in ``_kernels.pyx``; the two are
checked against each other in the test-suite and timed in
``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import heapq

import numpy as np


def _leq(a: float, b: float, tol: float) -> bool:
    return a <= b + tol * max(abs(a), abs(b))


def apsp(n, indptr, indices, weights, tol):
    """All-pairs Dijkstra with deterministic smallest-id predecessors.

    Returns ``(dist, pred)``; ``pred[s, v]`` is the smallest neighbour ``w`` of
    ``v`` with ``dist[s, w] + w(w, v) == dist[s, v]`` (within ``tol``), and
    ``pred[s, s] == -1``.  Unreachable entries are ``inf`` / ``-1``.
    """
    dist = np.full((n, n), np.inf)
    pred = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        d = [float("inf")] * n
        d[s] = 0.0
        heap = [(0.0, s)]
        done = [False] * n
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                nd = du + weights[k]
                if nd < d[v]:
                    d[v] = nd
                    heapq.heappush(heap, (nd, v))
        for v in range(n):
            if v == s or d[v] == float("inf"):
                continue
            best = -1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if d[w] != float("inf") and _leq(d[w] + weights[k], d[v], tol):
                    if best < 0 or w < best:
                        best = w
            pred[s, v] = best
        dist[s, :] = d
    return dist, pred


def collect_paths(pred, us, vs):
    """Extract ``P[u, v]`` for each pair as one flat CSR array."""
    ptr = [0]
    verts: list[int] = []
    for u, v in zip(us, vs):
        chunk = [v]
        x = v
        while x != u:
            x = int(pred[u, x])
            chunk.append(x)
        chunk.reverse()
        verts.extend(chunk)
        ptr.append(len(verts))
    return np.asarray(ptr, dtype=np.int64), np.asarray(verts, dtype=np.int64)


def greedy_hitting_set(n, ptr, verts):
    """Greedy hitting set over paths, then a descending-id minimality pass."""
    m = len(ptr) - 1
    if m == 0:
        return []
    inc: list[list[int]] = [[] for _ in range(n)]
    for p in range(m):
        for k in range(ptr[p], ptr[p + 1]):
            inc[verts[k]].append(p)
    count = [len(inc[v]) for v in range(n)]
    covered = [False] * m
    hubs = []
    while True:
        best, best_c = -1, 0
        for v in range(n):
            if count[v] > best_c:
                best, best_c = v, count[v]
        if best < 0:
            break
        hubs.append(best)
        for p in inc[best]:
            if covered[p]:
                continue
            covered[p] = True
            for k in range(ptr[p], ptr[p + 1]):
                count[verts[k]] -= 1
    hits = [0] * m
    for h in hubs:
        for p in inc[h]:
            hits[p] += 1
    kept = set(hubs)
    for h in sorted(hubs, reverse=True):
        if all(hits[p] >= 2 for p in inc[h]):
            kept.discard(h)
            for p in inc[h]:
                hits[p] -= 1
    return sorted(kept)
