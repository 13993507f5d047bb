"""Host-graph embeddings of bounded treewidth and their tree decompositions.

Three constructions share one machinery:

* ``embed_bounded_diameter`` keeps an additive error of ``4 eps diam``;
* ``embed_single_depot`` / ``embed_multi_depot`` stitch per-town embeddings
  together with depot-centred net bands so the error scales with the distance
  to the depot set.

Host vertices are the guest vertices themselves and every host edge is as
long as the guest distance between its endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .cover import CoverLadder, build_ladder
from .decomposition import TreeDecomposition
from .metric import (GraphError, MetricGraph, ScaleParams, diameter, gt, leq, make_params,
                     top_index)
from .towns import TownTree, build_core_hubs, build_net, build_towns


@dataclass
class AugmentationRecord:
    original_n: int
    depots: list[int]
    a: int
    b: int
    copies: int
    added: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    @property
    def pendants(self) -> list[int]:
        return sorted(v for vs in self.added.values() for v in vs)

    @property
    def count(self) -> int:
        return sum(len(vs) for vs in self.added.values())

    def to_dict(self) -> dict:
        return {"original_n": self.original_n, "depots": self.depots, "a": self.a, "b": self.b,
                "copies": self.copies, "added": self.count}


@dataclass
class HostEmbedding:
    mode: str
    guest: MetricGraph
    host: MetricGraph
    decomposition: TreeDecomposition
    epsilon: float
    params: ScaleParams | None = None
    depots: list[int] = field(default_factory=list)
    augmentation: AugmentationRecord | None = None
    bands: dict[int, list[int]] = field(default_factory=dict)
    band_width: int = 0
    town_levels: dict[int, int] = field(default_factory=dict)
    tree: TownTree | None = None
    ladder: CoverLadder | None = None

    @property
    def original_n(self) -> int:
        return self.augmentation.original_n if self.augmentation else self.guest.n

    @property
    def width(self) -> int:
        return self.decomposition.width

    def summary(self) -> dict:
        return {"mode": self.mode, "epsilon": self.epsilon, "width": self.width,
                "host_vertices": self.host.n, "host_edges": self.host.m,
                "bags": len(self.decomposition.bags), "depots": self.depots,
                "augmentation": self.augmentation.to_dict() if self.augmentation else None,
                "params": self.params.to_dict() if self.params else None}


def band_count(eps: float) -> int:
    """``ceil(log2(1/eps))`` with a guard against floating noise at powers of two."""
    return max(0, math.ceil(math.log2(1.0 / eps) - 1e-12))


def augment_depot_safety(g: MetricGraph, depots: Iterable[int], eta_hint: int,
                         c: float = 8.0) -> tuple[MetricGraph, AugmentationRecord]:
    """Hang ``(eta_hint + |S|)**2`` pendant copies at every radius ``r_a .. r_b`` off each depot."""
    S = sorted(set(int(s) for s in depots))
    if not S:
        raise GraphError("depot set is empty")
    for s in S:
        g.check_vertex(s)
    if eta_hint <= 0:
        raise GraphError(f"eta_hint must be positive, got {eta_hint}")
    if not c > 4:
        raise GraphError(f"c must exceed 4, got {c}")
    base = c / 4.0
    a = 0
    while not gt(base ** a, c / 2.0):
        a += 1
    delta = diameter(g)
    b = 0
    while not gt(base ** b, delta):
        b += 1
    copies = int((eta_hint + len(S)) ** 2)
    edges = list(g.edges)
    nxt = g.n
    rec = AugmentationRecord(g.n, S, a, b, copies)
    for s in S:
        for i in range(a, b + 1):
            ids = list(range(nxt, nxt + copies))
            nxt += copies
            rec.added[(s, i)] = ids
            edges.extend((s, v, base ** i) for v in ids)
    labels = None
    if g.labels is not None:
        labels = list(g.labels) + [f"pendant{v}" for v in range(g.n, nxt)]
    return MetricGraph(nxt, edges, role="augmented", labels=labels), rec


# -- bounded-diameter construction ---------------------------------------

@dataclass
class _Fragment:
    edges: set = field(default_factory=set)
    bags: list = field(default_factory=list)
    parent: list = field(default_factory=list)

    def add_bag(self, content, parent: int) -> int:
        self.bags.append(set(content))
        self.parent.append(parent)
        return len(self.bags) - 1


def _embed_towns(g: MetricGraph, tree: TownTree, start: int, eps: float, delta: float,
                 frag: _Fragment, parent_bag: int, inherited: frozenset):
    """Embed the subtree of towns under ``start`` into ``frag``."""
    stack = [(start, parent_bag, inherited)]
    threshold = eps * delta
    while stack:
        tid, pbag, above = stack.pop()
        t = tree[tid]
        if leq(t.diameter, threshold):
            centre = min(t.vertices)
            for u in t.vertices:
                if u != centre:
                    frag.edges.add((min(u, centre), max(u, centre)))
            b0 = frag.add_bag(above | {centre}, pbag)
            for u in sorted(t.vertices):
                if u != centre:
                    frag.add_bag(above | {centre, u}, b0)
            continue
        net = build_net(t.core_hubs, eps * t.diameter, g).selected
        for v in t.vertices:
            for h in net:
                if v != h:
                    frag.edges.add((min(v, h), max(v, h)))
        here = above | frozenset(net)
        bt = frag.add_bag(here, pbag)
        for k in reversed(t.children):
            stack.append((k, bt, here))


def _host_graph(g: MetricGraph, edges: Iterable[tuple[int, int]]) -> MetricGraph:
    dist = g.dist
    return MetricGraph(g.n, [(u, v, float(dist[u, v])) for u, v in sorted(edges)], role="host")


def embed_bounded_diameter(g: MetricGraph, tree: TownTree, eps: float,
                           delta: float | None = None) -> HostEmbedding:
    """Additive-error embedding: stars for maximal small towns, nets for large ones."""
    if not eps > 0:
        raise GraphError(f"epsilon must be positive, got {eps}")
    if delta is None:
        delta = diameter(g)
    frag = _Fragment()
    _embed_towns(g, tree, tree.root, eps, delta, frag, -1, frozenset())
    dec = TreeDecomposition([sorted(b) for b in frag.bags], frag.parent, 0)
    host = _host_graph(g, frag.edges)
    return HostEmbedding("diam", g, host, dec, eps, tree=tree)


# -- depot-rooted constructions ----------------------------------------

@dataclass
class PreparedRooted:
    """Augmented graph, ladder and towns; reusable across accuracy settings."""

    guest: MetricGraph
    record: AugmentationRecord
    params: ScaleParams
    ladder: CoverLadder
    tree: TownTree


def prepare_rooted(g: MetricGraph, depots: Iterable[int], eta_hint: int = 1, c: float = 8.0,
                   epsilon_hat: float = 0.5, distortion_constant: float = 32.0) -> PreparedRooted:
    gp, rec = augment_depot_safety(g, depots, eta_hint, c)
    params = make_params(c, epsilon_hat, 1.0, top_index(c, diameter(gp)), distortion_constant)
    ladder = build_ladder(gp, params)
    tree = build_core_hubs(build_towns(gp, ladder), ladder)
    return PreparedRooted(gp, rec, params, ladder, tree)


def _level(x: float) -> int:
    """Smallest ``k >= 1`` with ``x <= 2**k``."""
    k = 1
    while not leq(x, 2.0 ** k):
        k += 1
    return k


def _embed_rooted(prep: PreparedRooted, epsilon_hat: float, distortion_constant: float,
                  mode: str) -> HostEmbedding:
    if not epsilon_hat > 0:
        raise GraphError(f"epsilon_hat must be positive, got {epsilon_hat}")
    gp, tree = prep.guest, prep.tree
    params = make_params(prep.params.c, epsilon_hat, prep.params.scale_factor,
                         prep.params.r_max_index, distortion_constant)
    eps = params.epsilon
    S = prep.record.depots
    dist = gp.dist
    d_s = dist[S, :].min(axis=0)
    L = band_count(eps)
    root = tree[tree.root]
    tops = list(root.children) if root.children else [tree.root]
    levels = {tid: _level(float(d_s[sorted(tree[tid].vertices)].max())) for tid in tops}
    k_max = max(levels.values()) + L
    ground = sorted(set(root.core_hubs) | set(S))
    reach = {v: float(d_s[v]) for v in ground}
    bands: dict[int, list[int]] = {}
    inside = [v for v in ground if leq(reach[v], 1.0)]
    bands[0] = build_net(inside, eps, gp, must_contain=S).selected
    for k in range(k_max):
        ring = [v for v in ground if leq(reach[v], 2.0 ** (k + 1)) and gt(reach[v], 2.0 ** k)]
        bands[k + 1] = build_net(set(ring) | set(bands[k]), eps * 2.0 ** (k + 1), gp,
                                 must_contain=S).selected
    edges: set = set()
    for tid in tops:
        lo = levels[tid]
        hubs = set()
        for k in range(lo, lo + L + 1):
            hubs.update(bands[k])
        for v in tree[tid].vertices:
            for h in hubs:
                if v != h:
                    edges.add((min(v, h), max(v, h)))
    chain_top = max(levels.values())
    frag = _Fragment()
    chain: dict[int, int] = {}
    for k in range(1, chain_top + 1):
        content = set()
        for i in range(k - 1, k + L + 1):
            content.update(bands[i])
        chain[k] = frag.add_bag(content, chain.get(k - 1, -1))
    for tid in tops:
        first = len(frag.bags)
        sub = _Fragment()
        _embed_towns(gp, tree, tid, eps, tree[tid].diameter, sub, -1, frozenset())
        extra = frag.bags[chain[levels[tid]]]
        for bag, par in zip(sub.bags, sub.parent):
            frag.add_bag(bag | extra, chain[levels[tid]] if par < 0 else first + par)
        edges |= sub.edges
    dec = TreeDecomposition([sorted(b) for b in frag.bags], frag.parent, 0)
    host = _host_graph(gp, edges)
    return HostEmbedding(mode, gp, host, dec, eps, params=params, depots=list(S),
                         augmentation=prep.record, bands=bands, band_width=L,
                         town_levels=levels, tree=tree, ladder=prep.ladder)


def embed_single_depot(g: MetricGraph, s: int, epsilon_hat: float, eta_hint: int = 1,
                       c: float = 8.0, distortion_constant: float = 32.0,
                       prepared: PreparedRooted | None = None) -> HostEmbedding:
    """Error at most ``epsilon_hat (d(s,u) + d(s,v))`` on original pairs."""
    if not epsilon_hat > 0:
        raise GraphError(f"epsilon_hat must be positive, got {epsilon_hat}")
    prep = prepared or prepare_rooted(g, [s], eta_hint, c, epsilon_hat, distortion_constant)
    return _embed_rooted(prep, epsilon_hat, distortion_constant, "depot")


def embed_multi_depot(g: MetricGraph, depots: Iterable[int], epsilon_hat: float,
                      eta_hint: int = 1, c: float = 8.0, distortion_constant: float = 32.0,
                      prepared: PreparedRooted | None = None) -> HostEmbedding:
    """Multiplicative ``1 + O(eps)`` error plus ``eps`` times the distance to the depot set."""
    if not epsilon_hat > 0:
        raise GraphError(f"epsilon_hat must be positive, got {epsilon_hat}")
    prep = prepared or prepare_rooted(g, depots, eta_hint, c, epsilon_hat, distortion_constant)
    return _embed_rooted(prep, epsilon_hat, distortion_constant, "multi")


def band_membership(emb: HostEmbedding) -> dict[int, list[int]]:
    """For every net hub, the sorted band indices holding it."""
    out: dict[int, list[int]] = {}
    for k in sorted(emb.bands):
        for v in emb.bands[k]:
            out.setdefault(v, []).append(k)
    return out


def host_distances(emb: HostEmbedding) -> np.ndarray:
    return emb.host.dist
