"""Laminar town decomposition, approximate core hubs and greedy nets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .cover import CoverLadder
from .metric import REL_TOL, MetricGraph, ge, gt, leq


class TownError(RuntimeError):
    """A produced town broke an isolation or laminarity guarantee."""


@dataclass
class Town:
    id: int
    vertices: frozenset
    level: int
    diameter: float
    parent: int = -1
    children: list[int] = field(default_factory=list)
    core_hubs: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)


@dataclass
class TownTree:
    towns: list[Town]
    root: int
    n: int

    def __getitem__(self, tid: int) -> Town:
        return self.towns[tid]

    def __len__(self):
        return len(self.towns)

    @property
    def leaves(self) -> list[int]:
        return [t.id for t in self.towns if t.is_leaf]

    def leaf_of(self, v: int) -> int:
        for t in self.towns:
            if t.is_leaf and v in t.vertices:
                return t.id
        raise KeyError(v)

    def ancestors(self, tid: int) -> list[int]:
        """Towns strictly above ``tid``, nearest first."""
        out = []
        p = self.towns[tid].parent
        while p >= 0:
            out.append(p)
            p = self.towns[p].parent
        return out

    def preorder(self, start: int | None = None) -> list[int]:
        order, stack = [], [self.root if start is None else start]
        while stack:
            t = stack.pop()
            order.append(t)
            stack.extend(reversed(self.towns[t].children))
        return order

    def to_json(self) -> list[dict]:
        return [{"id": t.id, "level": t.level, "size": t.size, "diameter": t.diameter,
                 "parent": t.parent, "children": list(t.children),
                 "core_hubs": list(t.core_hubs), "core_hub_count": len(t.core_hubs),
                 "vertices": t.sorted_vertices()}
                for t in self.towns]


def _hub_distance(dist: np.ndarray, hubs: list[int]) -> np.ndarray:
    if not hubs:
        return np.full(dist.shape[0], math.inf)
    return dist[:, hubs].min(axis=1)


def _town_diameter(dist: np.ndarray, members: list[int]) -> float:
    if len(members) < 2:
        return 0.0
    return float(dist[np.ix_(members, members)].max())


def _check_isolation(dist: np.ndarray, members: list[int], r: float, n: int):
    diam = _town_diameter(dist, members)
    if not leq(diam, r):
        raise TownError(f"town {members[:8]} has diameter {diam} > r = {r}")
    if len(members) < n:
        mask = np.ones(n, dtype=bool)
        mask[members] = False
        gap = float(dist[np.ix_(members, np.flatnonzero(mask))].min())
        if not gt(gap, r):
            raise TownError(f"town {members[:8]} is only {gap} from the rest (r = {r})")
    return diam


def build_towns(g: MetricGraph, ladder: CoverLadder) -> TownTree:
    """Towns at every scale, deduplicated (lowest level wins) and linked by containment."""
    dist = g.dist
    n = g.n
    seen: dict[frozenset, int] = {}
    towns: list[Town] = []
    top = [-1] * n
    for i, hubs in enumerate(ladder.hubs):
        r = ladder.params.r(i)
        far = _hub_distance(dist, list(hubs))
        level_new: list[int] = []
        claimed: dict[int, int] = {}
        for v in range(n):
            if not gt(far[v], 2 * r):
                continue
            row = dist[v]
            members = np.flatnonzero(row <= r + REL_TOL * np.maximum(row, r)).tolist()
            key = frozenset(members)
            if key in seen:
                continue
            diam = _check_isolation(dist, members, r, n)
            for u in members:
                if u in claimed:
                    raise TownError(f"towns at level {i} overlap at vertex {u}")
                claimed[u] = len(towns)
            tid = len(towns)
            seen[key] = tid
            towns.append(Town(tid, key, i, diam))
            level_new.append(tid)
        for tid in level_new:
            t = towns[tid]
            kids = sorted({top[u] for u in t.vertices if top[u] >= 0})
            for k in kids:
                if not towns[k].vertices <= t.vertices:
                    raise TownError(f"town {k} straddles the boundary of town {tid}")
                towns[k].parent = tid
            t.children = kids
            for u in t.vertices:
                top[u] = tid
    roots = [t.id for t in towns if t.parent < 0]
    if len(roots) != 1 or towns[roots[0]].size != n:
        raise TownError("decomposition does not end in a single root town")
    tree = TownTree(towns, roots[0], n)
    for t in towns:
        if len(t.children) == 1:
            raise TownError(f"town {t.id} has exactly one child")
        if t.is_leaf and t.size != 1:
            raise TownError(f"leaf town {t.id} is not a singleton")
    return tree


def build_core_hubs(tree: TownTree, ladder: CoverLadder) -> TownTree:
    """Set ``X_T`` to every ladder hub inside each non-leaf town (in place)."""
    hubs = ladder.all_hubs()
    for t in tree.towns:
        t.core_hubs = [] if t.is_leaf else sorted(hubs & t.vertices)
    return tree


@dataclass
class Net:
    ground: list[int]
    delta: float
    selected: list[int]
    packing_waived: bool = False


def build_net(points: Iterable[int], delta: float, g: MetricGraph,
              must_contain: Iterable[int] | None = None) -> Net:
    """Greedy ``delta``-net: forced points first, then ascending id."""
    ground = sorted(set(int(p) for p in points))
    forced = sorted(set(int(p) for p in (must_contain or ())))
    missing = set(forced) - set(ground)
    if missing:
        raise ValueError(f"forced points {sorted(missing)} are not in the ground set")
    if delta <= 0:
        return Net(ground, delta, list(ground), False)
    dist = g.dist
    waived = False
    for a in range(len(forced)):
        for b in range(a + 1, len(forced)):
            if not ge(dist[forced[a], forced[b]], delta):
                waived = True
    selected = list(forced)
    chosen = set(selected)
    for p in ground:
        if p in chosen:
            continue
        if all(ge(dist[p, q], delta) for q in selected):
            selected.append(p)
            chosen.add(p)
    return Net(ground, delta, sorted(selected), waived)
