"""Seeded generators of road-like graph families.

Each family draws a fixed skeleton first and then hangs the remaining vertices
as leaves, round-robin over the skeleton anchors, with one weight per anchor.
Changing ``n`` with everything else fixed therefore only changes how many
identical leaves sit at each anchor.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .metric import GraphError, MetricGraph

FAMILIES = ("star-of-stars", "grid-with-highways", "random-cluster-tree")


@dataclass
class GeneratorSpec:
    family: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)


def _hang_leaves(rng: random.Random, edges: list, anchors: list[int], first: int, n: int,
                 lo: float, hi: float):
    weights = [round(rng.uniform(lo, hi), 3) for _ in anchors]
    for j, v in enumerate(range(first, n)):
        k = j % len(anchors)
        edges.append((anchors[k], v, weights[k]))


def star_of_stars(n: int, seed: int, hubs: int = 4) -> MetricGraph:
    """A centre joined to ``hubs`` hubs; remaining vertices are leaves of the hubs.

    With ``hubs=1`` the result is the plain star ``K_{1, n-1}``.
    """
    if hubs < 1:
        raise GraphError("star-of-stars needs at least one hub")
    rng = random.Random(seed)
    if hubs == 1:
        if n < 2:
            raise GraphError("star needs n >= 2")
        edges: list = []
        _hang_leaves(rng, edges, [0], 1, n, 1.0, 1.0)
        return MetricGraph(n, edges)
    if n < 1 + 2 * hubs:
        raise GraphError(f"star-of-stars with {hubs} hubs needs n >= {1 + 2 * hubs}")
    edges = [(0, h, round(rng.uniform(6.0, 12.0), 3)) for h in range(1, hubs + 1)]
    _hang_leaves(rng, edges, list(range(1, hubs + 1)), hubs + 1, n, 1.0, 2.0)
    return MetricGraph(n, edges)


def grid_with_highways(n: int, seed: int, side: int | None = None, highways: int = 2,
                       ratio: float = 0.5) -> MetricGraph:
    """``side x side`` grid with a few long shortcut edges; extra vertices become suburbs."""
    side = math.isqrt(n) if side is None else side
    if side < 2 or side * side > n:
        raise GraphError(f"grid side {side} does not fit n = {n}")
    if not 0 < ratio <= 1:
        raise GraphError("highway ratio must lie in (0, 1]")
    rng = random.Random(seed)
    idx = lambda r, c: r * side + c  # noqa: E731
    edges = []
    for r in range(side):
        for c in range(side):
            if c + 1 < side:
                edges.append((idx(r, c), idx(r, c + 1), round(rng.uniform(1.0, 2.0), 3)))
            if r + 1 < side:
                edges.append((idx(r, c), idx(r + 1, c), round(rng.uniform(1.0, 2.0), 3)))
    cells = [(r, c) for r in range(side) for c in range(side)]
    for _ in range(highways):
        while True:
            (r1, c1), (r2, c2) = rng.sample(cells, 2)
            hops = abs(r1 - r2) + abs(c1 - c2)
            if hops >= side:
                break
        edges.append((idx(r1, c1), idx(r2, c2), round(ratio * hops * 1.5, 3)))
    _hang_leaves(rng, edges, list(range(side * side)), side * side, n, 0.5, 1.0)
    return MetricGraph(n, edges)


def random_cluster_tree(n: int, seed: int, clusters: int = 3, core: int = 3) -> MetricGraph:
    """Small path-shaped clusters joined by long bridges along a random tree."""
    if clusters < 1 or core < 1:
        raise GraphError("need at least one cluster with one core vertex")
    base = clusters * core
    if n < base:
        raise GraphError(f"random-cluster-tree needs n >= {base}")
    rng = random.Random(seed)
    edges = []
    for k in range(clusters):
        for j in range(core - 1):
            edges.append((k * core + j, k * core + j + 1, round(rng.uniform(1.0, 2.0), 3)))
    for k in range(1, clusters):
        other = rng.randrange(k)
        u = k * core + rng.randrange(core)
        v = other * core + rng.randrange(core)
        edges.append((u, v, round(rng.uniform(15.0, 30.0), 3)))
    if n > base:
        _hang_leaves(rng, edges, list(range(base)), base, n, 0.5, 1.5)
    return MetricGraph(n, edges)


def generate(spec: GeneratorSpec) -> MetricGraph:
    if spec.family == "star-of-stars":
        return star_of_stars(spec.n, spec.seed, **spec.params)
    if spec.family == "grid-with-highways":
        return grid_with_highways(spec.n, spec.seed, **spec.params)
    if spec.family == "random-cluster-tree":
        return random_cluster_tree(spec.n, spec.seed, **spec.params)
    raise GraphError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")


def random_connected(n: int, seed: int, extra: int | None = None, integer: bool = True,
                     lo: float = 1.0, hi: float = 10.0) -> MetricGraph:
    """Random spanning tree plus ``extra`` chords; used for solver test instances."""
    rng = random.Random(seed)
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, _draw(rng, integer, lo, hi)))
    extra = n // 2 if extra is None else extra
    for _ in range(extra):
        if n < 3:
            break
        u, v = rng.sample(range(n), 2)
        edges.append((u, v, _draw(rng, integer, lo, hi)))
    return MetricGraph(n, edges)


def _draw(rng: random.Random, integer: bool, lo: float, hi: float) -> float:
    return float(rng.randint(int(lo), int(hi))) if integer else round(rng.uniform(lo, hi), 3)
