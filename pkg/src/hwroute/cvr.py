"""Exact capacitated vehicle routing by dynamic programming over a nice tree decomposition.

A flow configuration at a bag lists, for every bag vertex ``v`` and load ``q``,
how many tour segments enter (``I``) or leave (``O``) the cluster below the bag
through ``v`` having collected ``q`` units of demand so far.  Configurations are
kept normalised: an entry and an exit at the same ``(v, q)`` are fused into a
pass-through, which never changes the cost of the best completion.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .metric import REL_TOL, GraphError, MetricGraph, shortest_path
from .nice import FORGET, INTRODUCE, JOIN, LEAF, NiceDecomposition

INF = math.inf
DEFAULT_TABLE_LIMIT = 2_000_000


class InfeasibleInstance(ValueError):
    pass


class SolverResourceError(RuntimeError):
    """A DP table outgrew the configured guard."""


@dataclass
class VrpInstance:
    graph: MetricGraph
    depots: list[int]
    demands: dict[int, int]
    capacity: int
    penalties: dict[int, float] | None = None
    excluded: frozenset = frozenset()

    def __post_init__(self):
        self.depots = sorted(set(int(s) for s in self.depots))
        self.demands = {int(k): int(v) for k, v in self.demands.items()}
        if self.penalties is not None:
            self.penalties = {int(k): float(v) for k, v in self.penalties.items()}
        self.excluded = frozenset(int(v) for v in self.excluded)
        self.validate()

    @property
    def clients(self) -> list[int]:
        return sorted(self.demands)

    def validate(self):
        g = self.graph
        if not self.depots:
            raise GraphError("instance needs at least one depot")
        if self.capacity < 1:
            raise GraphError("capacity must be at least 1")
        for s in self.depots:
            g.check_vertex(s)
        for c, rho in self.demands.items():
            g.check_vertex(c)
            if c in self.depots:
                raise GraphError(f"client {c} is also a depot")
            if c in self.excluded:
                raise GraphError(f"vertex {c} is an augmentation vertex and cannot carry demand")
            if rho < 1:
                raise GraphError(f"client {c} has demand {rho} < 1")
            if rho > self.capacity:
                raise InfeasibleInstance(f"client {c} demands {rho} > capacity {self.capacity}")
        if self.penalties is not None:
            missing = set(self.demands) - set(self.penalties)
            if missing:
                raise GraphError(f"clients without a penalty: {sorted(missing)}")
            if any(p < 0 for p in self.penalties.values()):
                raise GraphError("penalties must be non-negative")

    def with_graph(self, graph: MetricGraph, excluded: Iterable[int] = ()) -> "VrpInstance":
        return VrpInstance(graph, self.depots, dict(self.demands), self.capacity,
                           dict(self.penalties) if self.penalties is not None else None,
                           frozenset(excluded))


@dataclass
class Tour:
    start: int
    end: int
    clients: list[int]
    walk: list[int]
    load: int
    cost: float


@dataclass
class TourSet:
    tours: list[Tour] = field(default_factory=list)
    cost: float = 0.0
    skipped: list[int] = field(default_factory=list)
    penalty: float = 0.0

    @property
    def total(self) -> float:
        return self.cost + self.penalty

    def assignment(self) -> dict[int, int]:
        return {c: i for i, t in enumerate(self.tours) for c in t.clients}

    def to_dict(self) -> dict:
        return {"cost": self.cost, "penalty": self.penalty, "total": self.total,
                "skipped": self.skipped,
                "tours": [{"start": t.start, "end": t.end, "clients": t.clients,
                           "walk": t.walk, "load": t.load, "cost": t.cost} for t in self.tours]}


# -- configurations --------------------------------------------------------

def normalize(counts: Mapping) -> tuple:
    """Canonical sorted tuple ``((v, kind, q, count), ...)`` with pass-throughs fused."""
    merged = {}
    for (v, kind, q), c in counts.items():
        if c:
            merged[(v, kind, q)] = merged.get((v, kind, q), 0) + c
    for (v, kind, q) in list(merged):
        if kind == "I" and (v, "O", q) in merged:
            m = min(merged[(v, "I", q)], merged[(v, "O", q)])
            merged[(v, "I", q)] -= m
            merged[(v, "O", q)] -= m
    return tuple(sorted((v, k, q, c) for (v, k, q), c in merged.items() if c > 0))


def as_counts(cfg: Iterable) -> dict:
    return {(v, k, q): c for v, k, q, c in cfg}


def join_oracle(parent, left, right, bag: Iterable[int], dist) -> float:
    """Cheapest way to connect two child configurations into ``parent``.

    Surplus entries of one child are matched with exits of the other at the
    same load; each match costs the distance between the two boundary
    vertices.  Returns ``inf`` when the flows cannot be balanced.
    """
    P, A, B = (as_counts(x) if not isinstance(x, dict) else x for x in (parent, left, right))
    bag = set(bag)
    keys = sorted({(v, q) for cfg in (P, A, B) for (v, _, q) in cfg} |
                  {(v, q) for v in bag for (_, _, q) in list(P) + list(A) + list(B)})

    def vec(cfg, kind):
        return tuple(cfg.get((v, kind, q), 0) for v, q in keys)

    i0, o0 = vec(P, "I"), vec(P, "O")

    def dec(t, i):
        return t[:i] + (t[i] - 1,) + t[i + 1:]

    @lru_cache(maxsize=None)
    def table(i1, o1, i2, o2):
        for idx in range(len(keys)):
            x = i1[idx] + i2[idx] - i0[idx]
            if x != 0:
                break
        else:
            return 0.0 if all(a + b == c for a, b, c in zip(o1, o2, o0)) else INF
        if x < 0:
            return INF
        u, q = keys[idx]
        best = INF
        for j, (v, q2) in enumerate(keys):
            if q2 != q:
                continue
            duv = float(dist[u][v])
            if i1[idx] > 0 and o2[j] > 0:
                best = min(best, table(dec(i1, idx), o1, i2, dec(o2, j)) + duv)
            if i2[idx] > 0 and o1[j] > 0:
                best = min(best, table(i1, dec(o1, j), dec(i2, idx), o2) + duv)
        return best

    return table(vec(A, "I"), vec(A, "O"), vec(B, "I"), vec(B, "O"))


# -- upper bound -----------------------------------------------------------

def heuristic_upper_bound(inst: VrpInstance) -> float:
    """Cost of a simple feasible solution: nearest-neighbour tours per nearest depot."""
    dist = inst.graph.dist
    S = inst.depots
    pen = inst.penalties or {}
    best = INF

    def greedy(clients):
        total = 0.0
        home: dict[int, list[int]] = {}
        for c in clients:
            s = min(S, key=lambda x: (dist[x, c], x))
            home.setdefault(s, []).append(c)
        for s, cs in home.items():
            left = set(cs)
            while left:
                here, load = s, 0
                while True:
                    fit = [c for c in left if load + inst.demands[c] <= inst.capacity]
                    if not fit:
                        break
                    nxt = min(fit, key=lambda c: (dist[here, c], c))
                    total += dist[here, nxt]
                    load += inst.demands[nxt]
                    left.discard(nxt)
                    here = nxt
                total += min(dist[here, x] for x in S)
        return total

    best = min(best, greedy(inst.clients))
    if inst.penalties is not None:
        finite = [c for c in inst.clients if math.isfinite(pen[c])]
        best = min(best, greedy([c for c in inst.clients if c not in finite])
                   + sum(pen[c] for c in finite))
        keep = [c for c in inst.clients
                if not pen[c] < 2 * min(dist[s, c] for s in S)]
        best = min(best, greedy(keep) + sum(pen[c] for c in inst.clients if c not in keep))
    return best


# -- the dynamic program ---------------------------------------------------

@dataclass
class DPStats:
    nodes: int = 0
    max_table: int = 0
    states: int = 0
    upper_bound: float = INF


class _CvrDP:
    def __init__(self, inst: VrpInstance, nice: NiceDecomposition, upper_bound: float | None,
                 table_limit: int):
        self.inst = inst
        self.nice = nice
        self.Q = inst.capacity
        self.depots = set(inst.depots)
        self.dist = inst.graph.dist
        self.ub = heuristic_upper_bound(inst) if upper_bound is None else upper_bound
        self.cut = self.ub + REL_TOL * max(1.0, abs(self.ub)) if math.isfinite(self.ub) else INF
        self.limit = table_limit
        self.max_count = inst.graph.n
        self.stats = DPStats(upper_bound=self.ub)

    def _admissible(self, cfg: tuple) -> bool:
        for v, k, q, c in cfg:
            if c > self.max_count:
                return False
            if k == "I" and q > 0 and v in self.depots:
                return False
        return True

    def _store(self, table: dict, cfg: tuple, cost: float, back):
        if cost > self.cut:
            return
        old = table.get(cfg)
        if old is None or cost < old[0] - 1e-12:
            table[cfg] = (cost, back)
            if len(table) > self.limit:
                raise SolverResourceError(
                    f"DP table exceeded {self.limit} configurations; lower Q or the width")

    def run(self):
        tables: list[dict | None] = [None] * len(self.nice.nodes)
        parents_left = [0] * len(self.nice.nodes)
        for nd in self.nice.nodes:
            for c in nd.children:
                parents_left[c] += 1
        for i, nd in enumerate(self.nice.nodes):
            if nd.kind == LEAF:
                t = {(): (0.0, None)}
            elif nd.kind == INTRODUCE:
                t = {cfg: (val[0], ("c", cfg)) for cfg, val in tables[nd.children[0]].items()}
            elif nd.kind == FORGET:
                t = self._forget(nd, tables[nd.children[0]])
            elif nd.kind == JOIN:
                t = self._join(nd, tables[nd.children[0]], tables[nd.children[1]])
            else:
                raise ValueError(nd.kind)
            tables[i] = t
            self.stats.nodes += 1
            self.stats.states += len(t)
            self.stats.max_table = max(self.stats.max_table, len(t))
        return tables

    def _visit_options(self, u, iu, ou, nbrs):
        """Yield ``(iu, ou, extra_counts, cost, events)`` for each way ``u`` is handled."""
        rho = self.inst.demands.get(u)
        if rho is None:
            yield iu, ou, {}, 0.0, ()
            return
        pens = self.inst.penalties
        if pens is not None and math.isfinite(pens[u]):
            yield iu, ou, {}, pens[u], (("skip", u),)
        Q = self.Q
        for q in sorted(iu):
            if q >= rho and iu[q] > 0:
                a = dict(iu)
                a[q] -= 1
                a[q - rho] = a.get(q - rho, 0) + 1
                yield a, ou, {}, 0.0, (("visit", u, q - rho, q),)
        for q in sorted(ou):
            if q <= Q - rho and ou[q] > 0:
                b = dict(ou)
                b[q] -= 1
                b[q + rho] = b.get(q + rho, 0) + 1
                yield iu, b, {}, 0.0, (("visit", u, q, q + rho),)
        for (v1, w1), (v2, w2) in itertools.product(nbrs, nbrs):
            for q in range(0, Q - rho + 1):
                if q > 0 and v1 in self.depots:
                    continue
                extra = {(v1, "I", q): 1}
                extra[(v2, "O", q + rho)] = extra.get((v2, "O", q + rho), 0) + 1
                ev = (("arc", v1, u, q), ("visit", u, q, q + rho), ("arc", u, v2, q + rho))
                yield iu, ou, extra, w1 + w2, ev

    def _targets(self, u: int, bag) -> list:
        """Bag vertices reachable from ``u`` without passing another bag vertex.

        Routing ``u -> v`` through a bag vertex ``w`` on a shortest path is
        the same as routing to ``w`` and letting ``w`` forward the unit later.
        """
        dist = self.dist
        others = [v for v in bag if v != u]
        out = []
        for v in others:
            duv = dist[u, v]
            if any(w != v and dist[u, w] + dist[w, v] <= duv + REL_TOL * duv for w in others):
                continue
            out.append((v, float(duv)))
        return out

    def _forget(self, nd, child: dict) -> dict:
        u = nd.vertex
        out: dict = {}
        if u in self.depots:
            for cfg, (cost, _) in child.items():
                if any(v == u and k == "I" and q > 0 for v, k, q, _ in cfg):
                    continue
                rest = tuple(e for e in cfg if e[0] != u)
                self._store(out, rest, cost, ("f", cfg, ()))
            return out
        nbrs = self._targets(u, nd.bag)
        for cfg, (cost, _) in child.items():
            iu, ou, rest = {}, {}, {}
            for v, k, q, c in cfg:
                if v == u:
                    (iu if k == "I" else ou)[q] = c
                else:
                    rest[(v, k, q)] = c
            for a, b, extra, add, events in self._visit_options(u, iu, ou, nbrs):
                base = cost + add
                if base > self.cut:
                    continue
                a, b = dict(a), dict(b)
                for q in list(a):
                    m = min(a[q], b.get(q, 0))
                    if m:
                        a[q] -= m
                        b[q] -= m
                residual = [(k, q, c) for k, side in (("I", a), ("O", b))
                            for q, c in sorted(side.items()) if c > 0]
                if residual and not nbrs:
                    continue
                start = dict(rest)
                for key, c in extra.items():
                    start[key] = start.get(key, 0) + c
                choices = [list(itertools.combinations_with_replacement(nbrs, c))
                           for _, _, c in residual]
                for pick in itertools.product(*choices):
                    counts = dict(start)
                    total = base
                    evs = list(events)
                    for (k, q, _), group in zip(residual, pick):
                        for v, w in group:
                            counts[(v, k, q)] = counts.get((v, k, q), 0) + 1
                            total += w
                            evs.append(("arc", v, u, q) if k == "I" else ("arc", u, v, q))
                    if total > self.cut:
                        continue
                    new = normalize(counts)
                    if self._admissible(new):
                        self._store(out, new, total, ("f", cfg, tuple(evs)))
        return out

    def _join(self, nd, left: dict, right: dict) -> dict:
        out: dict = {}
        rs = sorted(right.items(), key=lambda kv: kv[1][0])
        dist = self.inst.graph.dist
        for c1, (v1, _) in sorted(left.items(), key=lambda kv: kv[1][0]):
            if v1 > self.cut:
                break
            for c2, (v2, _) in rs:
                if v1 + v2 > self.cut:
                    break
                counts = as_counts(c1)
                fused = False
                for v, k, q, c in c2:
                    counts[(v, k, q)] = counts.get((v, k, q), 0) + c
                    other = (v, "O" if k == "I" else "I", q)
                    if counts.get(other, 0) > 0:
                        fused = True
                new = normalize(counts)
                if not self._admissible(new):
                    continue
                extra = join_oracle(new, c1, c2, nd.bag, dist) if fused else 0.0
                self._store(out, new, v1 + v2 + extra, ("j", c1, c2))
        return out


def _reconstruct(dp: _CvrDP, tables) -> TourSet:
    inst = dp.inst
    root = dp.nice.root
    if () not in tables[root]:
        raise InfeasibleInstance("no feasible routing found")
    events = []
    stack = [(root, ())]
    while stack:
        i, cfg = stack.pop()
        nd = dp.nice.nodes[i]
        _, back = tables[i][cfg]
        if back is None:
            continue
        if back[0] == "c":
            stack.append((nd.children[0], back[1]))
        elif back[0] == "f":
            events.extend(back[2])
            stack.append((nd.children[0], back[1]))
        else:
            stack.append((nd.children[0], back[1]))
            stack.append((nd.children[1], back[2]))
    skipped = sorted(e[1] for e in events if e[0] == "skip")
    arcs: dict = {}
    balance: dict = {}

    def add_arc(a, b, label):
        arcs.setdefault(a, []).append((b, label))
        balance[a] = balance.get(a, 0) + 1
        balance[b] = balance.get(b, 0) - 1

    for e in events:
        if e[0] == "arc":
            _, x, y, q = e
            add_arc((x, q), (y, q), ("arc", float(dp.dist[x, y])))
        elif e[0] == "visit":
            _, x, q0, q1 = e
            add_arc((x, q0), (x, q1), ("visit", x))
    hub = (-1, -1)
    for node, bal in list(balance.items()):
        if node[0] in dp.depots:
            for _ in range(max(bal, 0)):
                arcs.setdefault(hub, []).append((node, ("start", 0.0)))
            for _ in range(max(-bal, 0)):
                arcs.setdefault(node, []).append((hub, ("end", 0.0)))
    for key in arcs:
        arcs[key].sort(reverse=True)
    circuit = _euler(arcs, hub)
    tours = []
    current = None
    for node, label in circuit:
        if label is None:
            continue
        kind = label[0]
        if kind == "start":
            current = {"nodes": [node], "clients": [], "cost": 0.0}
        elif kind == "end":
            tours.append(_finish_tour(current, inst))
            current = None
        else:
            current["nodes"].append(node)
            if kind == "arc":
                current["cost"] += label[1]
            else:
                current["clients"].append(label[1])
    total = sum(t.cost for t in tours)
    pen = sum(inst.penalties[c] for c in skipped) if skipped else 0.0
    return TourSet(tours, total, skipped, pen)


def _euler(arcs: dict, start) -> list:
    """Hierholzer walk from ``start``; returns ``[(node, label_of_arc_into_node), ...]``."""
    if start not in arcs:
        return []
    stack = [(start, None)]
    circuit = []
    while stack:
        node, label = stack[-1]
        out = arcs.get(node)
        if out:
            nxt, lab = out.pop()
            stack.append((nxt, lab))
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return circuit


def _finish_tour(cur, inst: VrpInstance) -> Tour:
    stops = []
    for v, _ in cur["nodes"]:
        if not stops or stops[-1] != v:
            stops.append(v)
    walk = stops[:1]
    for a, b in zip(stops, stops[1:]):
        walk.extend(shortest_path(inst.graph, a, b)[1:])
    load = sum(inst.demands[c] for c in cur["clients"])
    return Tour(walk[0], walk[-1], list(cur["clients"]), walk, load, cur["cost"])


def _solve(inst: VrpInstance, nice: NiceDecomposition, upper_bound, table_limit, stats_out):
    missing = set(inst.depots) - set(nice.depots)
    if missing:
        raise GraphError(f"depots {sorted(missing)} are not pinned in the nice decomposition")
    forgotten = set(nice.forgotten_vertices())
    if set(inst.clients) - forgotten:
        raise GraphError("decomposition does not cover every client")
    if not inst.clients:
        return TourSet()
    dp = _CvrDP(inst, nice, upper_bound, table_limit)
    tables = dp.run()
    if stats_out is not None:
        stats_out.append(dp.stats)
    return _reconstruct(dp, tables)


def solve_cvr(inst: VrpInstance, nice: NiceDecomposition, upper_bound: float | None = None,
              table_limit: int = DEFAULT_TABLE_LIMIT, stats: list | None = None) -> TourSet:
    """Optimal tours; with several depots a tour may start and end at any of them."""
    if inst.penalties is not None:
        inst = VrpInstance(inst.graph, inst.depots, inst.demands, inst.capacity, None,
                           inst.excluded)
    return _solve(inst, nice, upper_bound, table_limit, stats)


def solve_cvr_penalties(inst: VrpInstance, nice: NiceDecomposition,
                        upper_bound: float | None = None,
                        table_limit: int = DEFAULT_TABLE_LIMIT,
                        stats: list | None = None) -> TourSet:
    """Optimal tour cost plus penalties of the clients left out."""
    if inst.penalties is None:
        raise GraphError("penalties variant needs a penalty for every client")
    return _solve(inst, nice, upper_bound, table_limit, stats)
