"""Brute-force referees and exhaustive auditors.

Nothing here reuses the solver code paths: distances are recomputed from the
raw edge list with Floyd-Warshall and canonical paths are re-derived from
those distances.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9
CVR_CLIENT_LIMIT = 8
SUBSET_LIMIT = 1_000_000


class OracleGuardError(ValueError):
    """The instance is larger than the brute-force guard allows."""


@dataclass
class OracleResult:
    problem: str
    cost: float
    solution: object
    search_space: int
    seconds: float


def floyd_warshall(n: int, edges: Iterable[Sequence]) -> np.ndarray:
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w, *_ in edges:
        u, v, w = int(u), int(v), float(w)
        if w < d[u, v]:
            d[u, v] = d[v, u] = w
    for k in range(n):
        np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :], out=d)
    return d


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


def canonical_path(n: int, adj: dict, d: np.ndarray, u: int, v: int) -> list[int]:
    """Walk back from ``v`` always stepping to the smallest-id tight neighbour."""
    path = [v]
    x = v
    while x != u:
        x = min(y for y, w in adj[x].items() if _close(d[u, y] + w, d[u, x]))
        path.append(x)
    return path[::-1]


def _adjacency(n: int, edges) -> dict:
    adj: dict = {v: {} for v in range(n)}
    for u, v, w, *_ in edges:
        u, v, w = int(u), int(v), float(w)
        if v not in adj[u] or w < adj[u][v]:
            adj[u][v] = adj[v][u] = w
    return adj


# -- vehicle routing -------------------------------------------------------

def _restricted_growth(m: int):
    """All set partitions of ``range(m)`` as block-label lists."""
    if m == 0:
        yield []
        return
    labels = [0] * m
    maxes = [0] * m

    def rec(i):
        if i == m:
            yield list(labels)
            return
        top = maxes[i - 1] + 1 if i > 0 else 0
        for b in range(top + 1):
            labels[i] = b
            maxes[i] = max(maxes[i - 1] if i > 0 else 0, b)
            yield from rec(i + 1)

    labels[0] = 0
    maxes[0] = 0
    yield from rec(1) if m > 1 else iter([[0]])


def brute_cvr(graph, depots: Sequence[int], demands: dict, capacity: int,
              penalties: dict | None = None) -> OracleResult:
    """Exhaustive optimum over client partitions and visiting orders.

    With several depots a tour may start and end at any depot.  With
    ``penalties`` any client may be skipped for its penalty.
    """
    t0 = time.perf_counter()
    clients = sorted(int(c) for c in demands)
    if len(clients) > CVR_CLIENT_LIMIT:
        raise OracleGuardError(f"{len(clients)} clients exceed the guard of {CVR_CLIENT_LIMIT}")
    if any(demands[c] > capacity for c in clients):
        raise OracleGuardError("some demand exceeds the capacity")
    d = floyd_warshall(graph.n, graph.edges)
    S = sorted(set(int(s) for s in depots))
    to_s = {c: float(min(d[s, c] for s in S)) for c in clients}
    memo: dict = {}

    def group_cost(group: tuple) -> tuple[float, tuple]:
        if group in memo:
            return memo[group]
        best, order = math.inf, ()
        for perm in itertools.permutations(group):
            cost = to_s[perm[0]]
            for a, b in zip(perm, perm[1:]):
                cost += d[a, b]
                if cost >= best:
                    break
            else:
                cost += to_s[perm[-1]]
                if cost < best:
                    best, order = cost, perm
        memo[group] = (best, order)
        return memo[group]

    best = (math.inf, None, None)
    count = 0
    skip_sets = [()]
    if penalties is not None:
        skip_sets = [s for r in range(len(clients) + 1)
                     for s in itertools.combinations(clients, r)]
    for skipped in skip_sets:
        served = [c for c in clients if c not in skipped]
        pen = sum(penalties[c] for c in skipped) if skipped else 0.0
        for labels in _restricted_growth(len(served)):
            count += 1
            blocks: dict = {}
            for c, b in zip(served, labels):
                blocks.setdefault(b, []).append(c)
            groups = [tuple(g) for g in blocks.values()]
            if any(sum(demands[c] for c in g) > capacity for g in groups):
                continue
            total = pen
            orders = []
            for g in groups:
                cost, order = group_cost(g)
                total += cost
                orders.append(list(order))
                if total >= best[0]:
                    break
            else:
                if total < best[0] - 1e-12:
                    best = (total, orders, list(skipped))
    sol = {"tours": best[1] or [], "skipped": best[2] or []}
    return OracleResult("cvr-pen" if penalties is not None else "cvr", float(best[0]), sol,
                        count, time.perf_counter() - t0)


def bell_number(m: int) -> int:
    row = [1]
    for _ in range(m):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


# -- k-center / k-median ---------------------------------------------------

def _subsets(n_cand: int, k: int) -> int:
    return math.comb(n_cand, k)


def brute_kcenter(graph, k: int, coverable: Iterable[int] | None = None,
                  candidates: Iterable[int] | None = None) -> OracleResult:
    t0 = time.perf_counter()
    d = floyd_warshall(graph.n, graph.edges)
    cov = sorted(coverable) if coverable is not None else list(range(graph.n))
    cand = sorted(candidates) if candidates is not None else list(range(graph.n))
    k = min(k, len(cand))
    if _subsets(len(cand), k) > SUBSET_LIMIT:
        raise OracleGuardError("too many center subsets")
    best, arg, count = math.inf, None, 0
    sub = d[np.ix_(cand, cov)]
    for combo in itertools.combinations(range(len(cand)), k):
        count += 1
        r = float(sub[list(combo)].min(axis=0).max()) if cov else 0.0
        if r < best - 1e-12:
            best, arg = r, [cand[i] for i in combo]
    return OracleResult("kcenter", best, arg, count, time.perf_counter() - t0)


def brute_kmedian(graph, k: int, weights: dict | None = None,
                  candidates: Iterable[int] | None = None) -> OracleResult:
    t0 = time.perf_counter()
    d = floyd_warshall(graph.n, graph.edges)
    wts = weights if weights is not None else {v: 1.0 for v in range(graph.n)}
    cov = sorted(v for v, w in wts.items() if w > 0)
    wv = np.array([wts[v] for v in cov], dtype=float)
    cand = sorted(candidates) if candidates is not None else list(range(graph.n))
    k = min(k, len(cand))
    if _subsets(len(cand), k) > SUBSET_LIMIT:
        raise OracleGuardError("too many center subsets")
    best, arg, count = math.inf, None, 0
    sub = d[np.ix_(cand, cov)]
    for combo in itertools.combinations(range(len(cand)), k):
        count += 1
        cost = float((sub[list(combo)].min(axis=0) * wv).sum()) if cov else 0.0
        if cost < best - 1e-12:
            best, arg = cost, [cand[i] for i in combo]
    return OracleResult("kmedian", best, arg, count, time.perf_counter() - t0)


# -- join matching -----------------------------------------------------------

def brute_join(parent: dict, left: dict, right: dict, dist) -> float:
    """Enumerate every matching of surplus entries of one child to exits of the other."""
    def units(cfg, kind):
        out = []
        for (v, k, q), c in sorted(cfg.items()):
            if k == kind:
                out.extend([(v, q)] * c)
        return out

    keys = {(v, q) for cfg in (parent, left, right) for (v, _, q) in cfg}
    surplus = {}
    for v, q in keys:
        x = left.get((v, "I", q), 0) + right.get((v, "I", q), 0) - parent.get((v, "I", q), 0)
        if x < 0:
            return math.inf
        surplus[(v, q)] = x
    li, ri = units(left, "I"), units(right, "I")
    lo, ro = units(left, "O"), units(right, "O")
    best = math.inf
    # choose which entries of each child are consumed by the matching
    need = sorted((vq, x) for vq, x in surplus.items() if x)
    choices = []
    for (v, q), x in need:
        a_max = li.count((v, q))
        b_max = ri.count((v, q))
        choices.append([(a, x - a) for a in range(0, x + 1) if a <= a_max and x - a <= b_max])
    for split in itertools.product(*choices):
        from_left, from_right = [], []
        for ((v, q), _), (a, b) in zip(need, split):
            from_left += [(v, q)] * a
            from_right += [(v, q)] * b
        for exits_r in itertools.permutations(range(len(ro)), len(from_left)):
            if any(ro[j][1] != from_left[i][1] for i, j in enumerate(exits_r)):
                continue
            for exits_l in itertools.permutations(range(len(lo)), len(from_right)):
                if any(lo[j][1] != from_right[i][1] for i, j in enumerate(exits_l)):
                    continue
                rem = {}
                for j, (v, q) in enumerate(lo):
                    if j not in exits_l:
                        rem[(v, q)] = rem.get((v, q), 0) + 1
                for j, (v, q) in enumerate(ro):
                    if j not in exits_r:
                        rem[(v, q)] = rem.get((v, q), 0) + 1
                want = {(v, q): c for (v, k, q), c in parent.items() if k == "O" and c}
                if rem != want:
                    continue
                cost = sum(float(dist[u][ro[j][0]]) for (u, _), j in zip(from_left, exits_r))
                cost += sum(float(dist[u][lo[j][0]]) for (u, _), j in zip(from_right, exits_l))
                best = min(best, cost)
    return best


# -- embedding audit ---------------------------------------------------------

@dataclass
class EmbeddingAudit:
    mode: str
    ok: bool
    lower_violations: int
    upper_violations: int
    worst_slack: float
    worst_pair: tuple | None
    max_additive_error: float
    pairs: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def audit_embedding(guest, host, mode: str, params: dict) -> EmbeddingAudit:
    """All-pairs check of ``d_G <= d_H <= bound`` over the original vertices.

    ``mode`` is ``identity`` (bound ``d_G``), ``diam`` (``d_G + 4 eps delta``),
    ``depot`` (``d_G + eps_hat (d(s,u) + d(s,v))``) or ``multi``
    (``(1 + c_mult eps) d_G + eps_hat min(d(S,u), d(S,v))``).
    """
    n0 = int(params.get("original_n", min(guest.n, host.n)))
    dg = floyd_warshall(guest.n, guest.edges)[:n0, :n0]
    dh = floyd_warshall(host.n, host.edges)[:n0, :n0]
    if mode == "identity":
        bound = dg.copy()
    elif mode == "diam":
        bound = dg + 4.0 * params["eps"] * params["delta"]
    elif mode in ("depot", "multi"):
        S = list(params["depots"])
        ds = dg[S, :].min(axis=0)
        eh = params["epsilon_hat"]
        if mode == "depot":
            bound = dg + eh * (ds[:, None] + ds[None, :])
        else:
            bound = (1.0 + params.get("c_mult", 8.0) * params["eps"]) * dg \
                + eh * np.minimum(ds[:, None], ds[None, :])
    else:
        raise ValueError(f"unknown audit mode {mode!r}")
    scale = np.maximum(1.0, np.maximum(np.abs(dg), np.abs(bound)))
    low = dh < dg - TOL * scale
    high = dh > bound + TOL * scale
    slack = bound - dh
    iu = np.triu_indices(n0, k=1)
    worst_pair, worst = None, math.inf
    if n0 > 1:
        k = int(np.argmin(slack[iu]))
        worst = float(slack[iu][k])
        worst_pair = (int(iu[0][k]), int(iu[1][k]))
        bad = np.argwhere(np.triu(low | high, 1))
        if len(bad):
            u, v = map(int, bad[0])
            worst_pair, worst = (u, v), float(slack[u, v])
    return EmbeddingAudit(mode, not (low.any() or high.any()), int(np.triu(low, 1).sum()),
                          int(np.triu(high, 1).sum()), worst, worst_pair,
                          float((dh - dg).max()) if n0 else 0.0, len(iu[0]))


# -- towns and covers --------------------------------------------------------

@dataclass
class StructureAudit:
    violations: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_cover(graph, ladder) -> StructureAudit:
    """Every canonical path in every band holds a hub, and every hub is needed."""
    rep = StructureAudit()
    d = floyd_warshall(graph.n, graph.edges)
    adj = _adjacency(graph.n, graph.edges)
    c = ladder.params.c
    for i, hubs in enumerate(ladder.hubs):
        r = ladder.params.r(i)
        hs = set(hubs)
        sole: dict[int, int] = {h: 0 for h in hs}
        for u in range(graph.n):
            for v in range(u + 1, graph.n):
                x = d[u, v]
                if not (x > r + TOL * max(x, r) and x <= c * r / 2 + TOL * max(x, c * r / 2)):
                    continue
                rep.checked += 1
                hit = [h for h in canonical_path(graph.n, adj, d, u, v) if h in hs]
                if not hit:
                    rep.violations.append(f"scale {i}: path {u}-{v} has no hub")
                elif len(hit) == 1:
                    sole[hit[0]] += 1
        for h, cnt in sorted(sole.items()):
            if cnt == 0:
                rep.violations.append(f"scale {i}: hub {h} is redundant")
    return rep


def audit_towns(graph, tree, ladder, eps: float | None = None) -> StructureAudit:
    """Isolation, branching, laminarity and core-hub checks over the whole tree."""
    rep = StructureAudit()
    n = graph.n
    d = floyd_warshall(n, graph.edges)
    adj = _adjacency(n, graph.edges)
    towns = tree.towns
    root = towns[tree.root]
    if set(root.vertices) != set(range(n)):
        rep.violations.append("root town is not the whole vertex set")
    for t in towns:
        rep.checked += 1
        r = ladder.params.r(t.level)
        vs = sorted(t.vertices)
        if len(vs) > 1:
            diam = float(d[np.ix_(vs, vs)].max())
            if diam > r + TOL * max(diam, r):
                rep.violations.append(f"town {t.id}: diameter {diam:.6g} exceeds r = {r:.6g}")
        out = sorted(set(range(n)) - set(vs))
        if out:
            gap = float(d[np.ix_(vs, out)].min())
            if not gap > r + TOL * max(gap, r):
                rep.violations.append(f"town {t.id}: isolation {gap:.6g} is not above r = {r:.6g}")
        if len(t.children) == 1:
            rep.violations.append(f"town {t.id}: exactly one child")
        if not t.children and len(vs) != 1:
            rep.violations.append(f"town {t.id}: childless but not a singleton")
        union = set()
        for k in t.children:
            ch = towns[k]
            if ch.level >= t.level:
                rep.violations.append(f"town {t.id}: child {k} is not on a lower level")
            if not set(ch.vertices) <= set(t.vertices):
                rep.violations.append(f"town {t.id}: child {k} is not contained in it")
            if union & set(ch.vertices):
                rep.violations.append(f"town {t.id}: children overlap")
            union |= set(ch.vertices)
        if t.children and union != set(vs):
            rep.violations.append(f"town {t.id}: children do not partition it")
    sets = [frozenset(t.vertices) for t in towns]
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            x, y = sets[a], sets[b]
            if x & y and not (x <= y or y <= x):
                rep.violations.append(f"towns {a} and {b} cross")
    for t in towns:
        if not t.children:
            continue
        hubs = set(t.core_hubs)
        owner = {}
        for k in t.children:
            for v in towns[k].vertices:
                owner[v] = k
        vs = sorted(t.vertices)
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                # vertices outside every child count as their own group
                if owner.get(u, -1 - u) == owner.get(v, -1 - v):
                    continue
                path = canonical_path(n, adj, d, u, v)
                gap = min((min(d[p, h] for p in path) for h in hubs), default=math.inf)
                limit = (eps or 0.0) * d[u, v]
                if gap > limit + TOL * max(1.0, limit):
                    rep.violations.append(f"town {t.id}: pair {u}-{v} has no core hub near its path")
    return rep
