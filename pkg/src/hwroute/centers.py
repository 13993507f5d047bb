"""Exact k-center and k-median over a tree decomposition.

Every vertex gets a label ``tau_v``: ``0`` for a chosen center, otherwise a
claimed distance to the nearest center, or ``FAR`` when the vertex needs no
service.  A positive label must be *supported* by some neighbour ``u`` with
``tau_u + w(u, v) <= tau_v``, so following supports always reaches a center
within the claimed distance.  The true distances form a valid labelling, hence
optimising over supported labellings is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .decomposition import TreeDecomposition, restrict_decomposition
from .metric import GraphError, MetricGraph, leq
from .nice import FORGET, INTRODUCE, LEAF, make_nice

FAR = math.inf
DEFAULT_STATE_LIMIT = 3_000_000


class CenterResourceError(RuntimeError):
    pass


@dataclass
class CenterSolution:
    centers: list[int]
    value: float
    states: int = 0


class _LabelDP:
    """Shared machinery; ``median`` switches between max-radius and weighted-sum costs."""

    def __init__(self, g: MetricGraph, d: TreeDecomposition, k: int, candidates: list[int],
                 domains: dict[int, list[float]], weights: dict[int, float] | None,
                 limit: int, far_only: set[int] = frozenset(), bound: float = FAR):
        self.g = g
        self.k = k
        self.cand = set(candidates)
        self.domains = domains
        self.weights = weights
        self.median = weights is not None
        self.adj = {u: dict(g.neighbors(u)) for u in range(g.n)}
        self.nice = make_nice(restrict_decomposition(d, set(range(g.n)) - set(far_only)))
        self.bound = bound + 1e-9 * max(1.0, bound) if bound < FAR else FAR
        self.limit = limit
        self.far_only = far_only
        self.states = 0
        self._cand = np.array(sorted(self.cand), dtype=np.int64)
        self._dc = g.dist[:, self._cand]
        self._seen: dict = {}

    # labels are compared with the graph tolerance
    def _consistent(self, tu: float, tv: float, w: float, R: float | None) -> bool:
        if tu == FAR and tv == FAR:
            return True
        if tu == FAR or tv == FAR:
            t = tv if tu == FAR else tu
            return R is None or not leq(t + w, R)
        return leq(abs(tu - tv), w)

    def _explainable(self, bag: tuple, labs: tuple, R: float | None) -> bool:
        """Can at most ``k`` candidates reproduce the bag labels as nearest distances?

        The true labelling is ``d(., C)`` for the optimal center set ``C``, so it
        always passes; partial labellings that no small center set explains are
        dropped early.
        """
        key = (bag, labs)
        hit = self._seen.get(key)
        if hit is not None:
            return hit
        dc = self._dc
        ok = np.ones(len(self._cand), dtype=bool)
        finite = []
        for v, t in zip(bag, labs):
            row = dc[v]
            if t == FAR:
                if R is not None:
                    ok &= row > R + 1e-9 * max(1.0, R)
            else:
                ok &= row >= t - 1e-9 * max(1.0, t)
                finite.append((row, t))
        options = []
        for row, t in finite:
            match = ok & (np.abs(row - t) <= 1e-9 * max(1.0, t))
            if not match.any():
                self._seen[key] = False
                return False
            options.append(frozenset(np.flatnonzero(match).tolist()))
        res = _hitting(sorted(set(options), key=len), self.k)
        self._seen[key] = res
        return res

    def run(self, R: float | None = None):
        nodes = self.nice.nodes
        tables: list = [None] * len(nodes)
        for i, nd in enumerate(nodes):
            if nd.kind == LEAF:
                t = {}
                v = nd.vertex
                for lab in self.domains[v]:
                    flag = 1 if lab == 0 or lab == FAR else 0
                    self._put(t, ((lab,), flag, 0), 0.0, None)
            elif nd.kind == INTRODUCE:
                t = self._introduce(nd, nodes[nd.children[0]].bag, tables[nd.children[0]], R)
            elif nd.kind == FORGET:
                t = self._forget(nd, nodes[nd.children[0]].bag, tables[nd.children[0]])
            else:
                t = self._join(tables[nd.children[0]], tables[nd.children[1]])
            tables[i] = t
            self.states += len(t)
            if len(t) > self.limit:
                raise CenterResourceError(f"label table exceeded {self.limit} states")
        return tables

    def _put(self, t: dict, key, val: float, back):
        old = t.get(key)
        if old is None or val < old[0] - 1e-12:
            t[key] = (val, back)

    def _introduce(self, nd, cbag, child: dict, R):
        v = nd.vertex
        pos = nd.bag.index(v)
        if v in self.far_only:
            nbrs = []
        else:
            nbrs = [(j, u, self.adj[v][u]) for j, u in enumerate(cbag)
                    if u in self.adj[v] and u not in self.far_only]
        out: dict = {}
        for (labs, flags, cnt), (val, _) in child.items():
            for lab in self.domains[v]:
                fv = 1 if lab == 0 or lab == FAR else 0
                nf = flags
                ok = True
                for j, u, w in nbrs:
                    tu = labs[j]
                    if not self._consistent(tu, lab, w, R):
                        ok = False
                        break
                    if tu != FAR and lab != FAR:
                        if leq(tu + w, lab):
                            fv = 1
                        if leq(lab + w, tu):
                            nf |= 1 << j
                if not ok:
                    continue
                low = nf & ((1 << pos) - 1)
                high = (nf >> pos) << (pos + 1)
                key = (labs[:pos] + (lab,) + labs[pos:], low | (fv << pos) | high, cnt)
                if self.bound < FAR and val + self._pending(key[0], nd.bag) > self.bound:
                    continue
                if not self._explainable(nd.bag, key[0], R):
                    continue
                self._put(out, key, val, ((labs, flags, cnt), lab))
        return out

    def _pending(self, labs: tuple, bag) -> float:
        """Cost the bag vertices will add once forgotten."""
        return sum(self.weights.get(v, 0.0) * t for v, t in zip(bag, labs) if t != FAR)

    def _forget(self, nd, cbag, child: dict):
        v = nd.vertex
        pos = cbag.index(v)
        wv = self.weights.get(v, 0.0) if self.median else 0.0
        out: dict = {}
        for key, (val, _) in child.items():
            labs, flags, cnt = key
            if not (flags >> pos) & 1:
                continue
            lab = labs[pos]
            c2 = cnt + (1 if lab == 0 else 0)
            if c2 > self.k:
                continue
            add = wv * lab if self.median and lab != FAR else 0.0
            low = flags & ((1 << pos) - 1)
            high = (flags >> (pos + 1)) << pos
            nkey = (labs[:pos] + labs[pos + 1:], low | high, c2 if self.median else 0)
            # k-center minimises the number of centres, k-median the cost at a given count
            nval = val + add if self.median else val + (1 if lab == 0 else 0)
            if not self.median and nval > self.k:
                continue
            self._put(out, nkey, nval, (key,))
        return out

    def _join(self, left: dict, right: dict):
        out: dict = {}
        by_labels: dict = {}
        for key, (val, _) in right.items():
            by_labels.setdefault(key[0], []).append((key, val))
        for key, (val, _) in left.items():
            for rkey, rval in by_labels.get(key[0], ()):
                cnt = key[2] + rkey[2]
                if cnt > self.k:
                    continue
                tot = val + rval
                if not self.median and tot > self.k:
                    continue
                self._put(out, (key[0], key[1] | rkey[1], cnt), tot, (key, rkey))
        return out

    def centers(self, tables) -> tuple[float, list[int]] | None:
        root = self.nice.root
        t = tables[root]
        if not t:
            return None
        key = min(t, key=lambda x: (t[x][0], x[2]))
        val = t[key][0]
        chosen = []
        stack = [(root, key)]
        nodes = self.nice.nodes
        while stack:
            i, key = stack.pop()
            nd = nodes[i]
            back = tables[i][key][1]
            if nd.kind == LEAF:
                if key[0][0] == 0:
                    chosen.append(nd.vertex)
            elif nd.kind == INTRODUCE:
                stack.append((nd.children[0], back[0]))
            elif nd.kind == FORGET:
                ckey = back[0]
                pos = nodes[nd.children[0]].bag.index(nd.vertex)
                if ckey[0][pos] == 0:
                    chosen.append(nd.vertex)
                stack.append((nd.children[0], ckey))
            else:
                stack.append((nd.children[0], back[0]))
                stack.append((nd.children[1], back[1]))
        return val, sorted(set(chosen))


def _hitting(sets: list, budget: int) -> bool:
    if not sets:
        return True
    if budget == 0:
        return False
    for x in sets[0]:
        if _hitting([t for t in sets[1:] if x not in t], budget - 1):
            return True
    return False


def _candidate_list(g: MetricGraph, candidates) -> list[int]:
    cand = sorted(set(int(x) for x in candidates)) if candidates is not None else list(range(g.n))
    for x in cand:
        g.check_vertex(x)
    if not cand:
        raise GraphError("no candidate centers")
    return cand


def solve_kcenter_td(g: MetricGraph, d: TreeDecomposition, k: int,
                     coverable: Iterable[int] | None = None,
                     candidates: Iterable[int] | None = None,
                     far_only: Iterable[int] = (),
                     state_limit: int = DEFAULT_STATE_LIMIT) -> CenterSolution:
    """Smallest radius at which ``k`` candidate centers cover ``coverable``.

    Vertices in ``far_only`` are never served and never relay a distance; this
    is only exact when no shortest path between other vertices uses them.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    cov = set(int(v) for v in coverable) if coverable is not None else set(range(g.n))
    cand = _candidate_list(g, candidates)
    far = set(int(v) for v in far_only)
    if cov & far:
        raise GraphError("a coverable vertex cannot be marked far-only")
    if not cov:
        return CenterSolution(cand[:k], 0.0)
    if cov <= set(cand) and k >= len(cov):
        return CenterSolution(sorted(cov), 0.0)
    dist = g.dist
    radii = sorted({0.0} | {float(dist[v, x]) for v in cov for x in cand})
    best = None
    lo, hi = 0, len(radii) - 1
    states = 0
    while lo <= hi:
        mid = (lo + hi) // 2
        R = radii[mid]
        domains = {}
        for v in range(g.n):
            if v in far:
                domains[v] = [FAR]
                continue
            vals = sorted({float(dist[v, x]) for x in cand if leq(float(dist[v, x]), R)})
            if vals and vals[0] == 0.0 and v not in cand:
                vals = vals[1:]
            if v not in cov:
                vals.append(FAR)
            domains[v] = vals
        dp = _LabelDP(g, d, k, cand, domains, None, state_limit, far)
        res = dp.centers(dp.run(R))
        states += dp.states
        if res is not None and res[0] <= k:
            best = (R, res[1])
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise GraphError("no feasible k-center solution (is every vertex reachable?)")
    centers = best[1] or cand[:1]
    radius = max(min(float(dist[v, x]) for x in centers) for v in cov)
    return CenterSolution(centers, radius, states)


def solve_kmedian_td(g: MetricGraph, d: TreeDecomposition, k: int,
                     weights: dict[int, float] | None = None,
                     candidates: Iterable[int] | None = None,
                     far_only: Iterable[int] = (),
                     state_limit: int = DEFAULT_STATE_LIMIT,
                     upper: Iterable[int] | None = None) -> CenterSolution:
    """Minimum weighted sum of distances to the nearest of at most ``k`` centers.

    ``upper`` is any feasible center set; its cost prunes partial labellings.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    wts = {int(v): float(w) for v, w in (weights or {v: 1.0 for v in range(g.n)}).items()}
    if any(w < 0 for w in wts.values()):
        raise GraphError("weights must be non-negative")
    cand = _candidate_list(g, candidates)
    far = set(int(v) for v in far_only)
    upper = None if upper is None else sorted(set(int(x) for x in upper))
    if any(wts.get(v, 0.0) > 0 for v in far):
        raise GraphError("a weighted vertex cannot be marked far-only")
    served = sorted(v for v, w in wts.items() if w > 0)
    if set(served) <= set(cand) and k >= len(served):
        return CenterSolution(served or cand[:1], 0.0)
    dist = g.dist
    bound = FAR
    if upper is not None:
        bound = sum(w * min(float(dist[v, x]) for x in upper) for v, w in wts.items() if w > 0)
    domains = {}
    for v in range(g.n):
        if v in far:
            domains[v] = [FAR]
            continue
        cap = bound / wts[v] if wts.get(v, 0.0) > 0 else FAR
        vals = sorted({float(dist[v, x]) for x in cand if x != v and leq(float(dist[v, x]), cap)})
        if v in cand:
            vals.insert(0, 0.0)
        domains[v] = vals
    dp = _LabelDP(g, d, k, cand, domains, wts, state_limit, far, bound)
    res = dp.centers(dp.run(None))
    if res is None:
        raise GraphError("no feasible k-median solution")
    centers = res[1] or cand[:1]
    cost = sum(w * min(float(dist[v, x]) for x in centers) for v, w in wts.items() if w > 0)
    return CenterSolution(centers, cost, dp.states)
