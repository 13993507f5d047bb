"""Weighted undirected graphs, shortest paths and the canonical distance scaling."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

REL_TOL = 1e-9
DENSE_LIMIT = 5000
ROLES = ("guest", "host", "augmented")


class GraphError(ValueError):
    """Raised for malformed graphs and invalid queries."""


def leq(a: float, b: float, tol: float = REL_TOL) -> bool:
    """``a <= b`` up to a relative tolerance (exact when either side is infinite)."""
    if math.isinf(a) or math.isinf(b):
        return a <= b
    return a <= b + tol * max(abs(a), abs(b))


def gt(a: float, b: float, tol: float = REL_TOL) -> bool:
    return not leq(a, b, tol)


def ge(a: float, b: float, tol: float = REL_TOL) -> bool:
    return leq(b, a, tol)


def in_band(x: float, lo: float, hi: float) -> bool:
    """Membership of ``x`` in the half-open interval ``(lo, hi]``."""
    return gt(x, lo) and leq(x, hi)


class MetricGraph:
    """Connected graph with positive edge weights and cached shortest paths.

    Vertices are the dense ids ``0..n-1``.  Parallel edges collapse to the
    lightest copy.  The instance is treated as immutable once built.
    """

    def __init__(self, n: int, edges: Iterable[Sequence], role: str = "guest",
                 labels: Sequence[str] | None = None):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        if role not in ROLES:
            raise GraphError(f"unknown role {role!r}")
        self.n = int(n)
        self.role = role
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphError("label count does not match vertex count")
        best: dict[tuple[int, int], float] = {}
        for e in edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (w > 0 and math.isfinite(w)):
                raise GraphError(f"edge ({u}, {v}) has non-positive or non-finite weight {w}")
            key = (u, v) if u < v else (v, u)
            if key not in best or w < best[key]:
                best[key] = w
        self.edges: list[tuple[int, int, float]] = [(u, v, w) for (u, v), w in sorted(best.items())]
        self._build_csr()
        self._check_connected()
        self._dist: np.ndarray | None = None
        self._pred: np.ndarray | None = None
        self._rows: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _build_csr(self):
        deg = np.zeros(self.n + 1, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u + 1] += 1
            deg[v + 1] += 1
        indptr = np.cumsum(deg)
        indices = np.empty(indptr[-1], dtype=np.int64)
        weights = np.empty(indptr[-1], dtype=np.float64)
        fill = indptr[:-1].copy()
        for u, v, w in self.edges:
            for a, b in ((u, v), (v, u)):
                indices[fill[a]] = b
                weights[fill[a]] = w
                fill[a] += 1
        self.indptr, self.indices, self.weights = indptr, indices, weights

    def _check_connected(self):
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for k in range(self.indptr[u], self.indptr[u + 1]):
                v = self.indices[k]
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            raise GraphError(f"graph is disconnected: vertex {missing} is unreachable from 0")

    # -- adjacency -----------------------------------------------------
    def neighbors(self, u: int):
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist())

    def edge_weight(self, u: int, v: int) -> float | None:
        for x, w in self.neighbors(u):
            if x == v:
                return w
        return None

    @property
    def m(self) -> int:
        return len(self.edges)

    # -- shortest paths ------------------------------------------------
    @property
    def dense(self) -> bool:
        return self.n <= DENSE_LIMIT

    def _ensure_dense(self):
        if self._dist is None:
            dist, self._pred = kernels.apsp(self.n, self.indptr, self.indices,
                                            self.weights, REL_TOL)
            # summation order can differ by direction in the last bit
            self._dist = np.minimum(dist, dist.T)

    @property
    def dist(self) -> np.ndarray:
        """Full distance matrix (computed on first use)."""
        self._ensure_dense()
        return self._dist

    @property
    def pred(self) -> np.ndarray:
        self._ensure_dense()
        return self._pred

    def row(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        """Distances and canonical predecessors from ``s``."""
        if self.dense:
            self._ensure_dense()
            return self._dist[s], self._pred[s]
        if s not in self._rows:
            if len(self._rows) > 256:
                self._rows.clear()
            self._rows[s] = _single_source(self, s)
        return self._rows[s]

    def d(self, u: int, v: int) -> float:
        if self.dense:
            return float(self.dist[u, v])
        a, b = (u, v) if u <= v else (v, u)
        return float(self.row(a)[0][b])

    def check_vertex(self, v: int):
        if not (0 <= int(v) < self.n):
            raise GraphError(f"vertex {v} outside 0..{self.n - 1}")

    def scaled(self, s: float, role: str | None = None) -> "MetricGraph":
        g = MetricGraph(self.n, [(u, v, w * s) for u, v, w in self.edges],
                        role=role or self.role, labels=self.labels)
        return g

    def __repr__(self):
        return f"MetricGraph(n={self.n}, m={self.m}, role={self.role!r})"


def _single_source(g: MetricGraph, s: int):
    d = [math.inf] * g.n
    d[s] = 0.0
    heap = [(0.0, s)]
    done = [False] * g.n
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in g.neighbors(u):
            if du + w < d[v]:
                d[v] = du + w
                heapq.heappush(heap, (d[v], v))
    pred = np.full(g.n, -1, dtype=np.int64)
    for v in range(g.n):
        if v == s:
            continue
        cands = [x for x, w in g.neighbors(v) if leq(d[x] + w, d[v])]
        pred[v] = min(cands)
    return np.asarray(d), pred


def shortest_distance(g: MetricGraph, u: int, v: int) -> float:
    g.check_vertex(u)
    g.check_vertex(v)
    d = g.d(u, v)
    if not math.isfinite(d):
        raise GraphError(f"unreachable: no path between {u} and {v}")
    return d


def shortest_path(g: MetricGraph, u: int, v: int) -> list[int]:
    """Deterministic shortest path: each step back uses the smallest-id predecessor."""
    g.check_vertex(u)
    g.check_vertex(v)
    _, pred = g.row(u)
    path = [v]
    x = v
    while x != u:
        x = int(pred[x])
        if x < 0:
            raise GraphError(f"unreachable: no path between {u} and {v}")
        path.append(x)
    path.reverse()
    return path


def path_length(g: MetricGraph, path: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        w = g.edge_weight(a, b)
        if w is None:
            raise GraphError(f"({a}, {b}) is not an edge")
        total += w
    return total


def ball(g: MetricGraph, v: int, r: float) -> set[int]:
    """Closed ball of radius ``r`` around ``v``."""
    if r < 0:
        raise GraphError("ball radius must be non-negative")
    row = g.row(v)[0]
    return {int(u) for u in range(g.n) if leq(row[u], r)}


def diameter(g: MetricGraph, vertices: Iterable[int] | None = None) -> float:
    if vertices is None:
        return float(g.dist.max()) if g.n > 1 else 0.0
    vs = sorted(set(vertices))
    if len(vs) < 2:
        return 0.0
    return float(g.dist[np.ix_(vs, vs)].max())


def min_distance(g: MetricGraph) -> float:
    """Smallest positive pairwise distance (the lightest edge)."""
    if not g.edges:
        return 0.0
    return min(w for _, _, w in g.edges)


def aspect_ratio(g: MetricGraph) -> float:
    dmin = min_distance(g)
    return diameter(g) / dmin if dmin > 0 else 1.0


def set_distance(g: MetricGraph, v: int, targets: Iterable[int]) -> float:
    """``d(v, targets)``; infinite for an empty target set."""
    ts = list(targets)
    if not ts:
        return math.inf
    return float(g.dist[v, ts].min())


def top_index(c: float, diam: float) -> int:
    """Smallest ``i >= 0`` with ``(c/4)**i >= diam``."""
    base = c / 4.0
    i = 0
    while not leq(diam, base ** i):
        i += 1
    return i


@dataclass(frozen=True)
class ScaleParams:
    c: float
    epsilon_hat: float
    epsilon: float
    scale_factor: float
    r_max_index: int
    distortion_constant: float = 32.0

    def r(self, i: int) -> float:
        return (self.c / 4.0) ** i

    @property
    def radii(self) -> list[float]:
        return [self.r(i) for i in range(self.r_max_index + 1)]

    def with_top(self, r_max_index: int) -> "ScaleParams":
        return ScaleParams(self.c, self.epsilon_hat, self.epsilon, self.scale_factor,
                           r_max_index, self.distortion_constant)

    def to_dict(self) -> dict:
        return {"c": self.c, "epsilon_hat": self.epsilon_hat, "epsilon": self.epsilon,
                "scale_factor": self.scale_factor, "r_max_index": self.r_max_index,
                "distortion_constant": self.distortion_constant}


def make_params(c: float, epsilon_hat: float, scale_factor: float, r_max_index: int,
                distortion_constant: float = 32.0) -> ScaleParams:
    if not c > 4:
        raise GraphError(f"c must exceed 4, got {c}")
    if not epsilon_hat > 0:
        raise GraphError(f"epsilon_hat must be positive, got {epsilon_hat}")
    if not distortion_constant > 0:
        raise GraphError("distortion constant must be positive")
    eps = min(0.25, epsilon_hat / distortion_constant)
    return ScaleParams(float(c), float(epsilon_hat), eps, float(scale_factor),
                       int(r_max_index), float(distortion_constant))


def canonical_scale(g: MetricGraph, c: float = 8.0, epsilon_hat: float = 0.5,
                    distortion_constant: float = 32.0) -> tuple[MetricGraph, ScaleParams]:
    """Rescale so the smallest pairwise distance becomes ``0.505 c``."""
    if not c > 4:
        raise GraphError(f"c must exceed 4, got {c}")
    if g.n == 1:
        return g.scaled(1.0), make_params(c, epsilon_hat, 1.0, 0, distortion_constant)
    s = 0.505 * c / min_distance(g)
    h = g.scaled(s)
    return h, make_params(c, epsilon_hat, s, top_index(c, diameter(h)), distortion_constant)
