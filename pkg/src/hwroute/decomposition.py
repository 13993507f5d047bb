"""Tree decompositions: container, text format and the three-property validator."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .metric import MetricGraph


@dataclass
class TreeDecomposition:
    bags: list[list[int]]
    parent: list[int]
    root: int = 0

    def __post_init__(self):
        self.bags = [sorted(set(int(v) for v in b)) for b in self.bags]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(i)
        return kids

    def to_text(self) -> str:
        return "".join(f"{i} {p} {' '.join(map(str, b))}".rstrip() + "\n"
                       for i, (b, p) in enumerate(zip(self.bags, self.parent)))

    @classmethod
    def from_text(cls, text: str) -> "TreeDecomposition":
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [int(x) for x in line.split()]
            if len(parts) < 2:
                raise ValueError(f"bag line needs an id and a parent: {line!r}")
            rows.append((parts[0], parts[1], parts[2:]))
        rows.sort()
        ids = [r[0] for r in rows]
        if ids != list(range(len(rows))):
            raise ValueError("bag ids must be 0..k-1")
        roots = [r[0] for r in rows if r[1] < 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root bag, found {len(roots)}")
        return cls([r[2] for r in rows], [r[1] for r in rows], roots[0])


def single_bag(n: int) -> TreeDecomposition:
    return TreeDecomposition([list(range(n))], [-1], 0)


def elimination_decomposition(g: MetricGraph) -> TreeDecomposition:
    """Decomposition from a greedy min-degree elimination order (ties by id)."""
    adj = {u: set() for u in range(g.n)}
    for u, v, _ in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    order, bags = [], []
    alive = set(range(g.n))
    while alive:
        v = min(alive, key=lambda x: (len(adj[x]), x))
        nb = adj[v]
        bags.append(sorted(nb | {v}))
        order.append(v)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        alive.discard(v)
        del adj[v]
    pos = {v: i for i, v in enumerate(order)}
    parent = []
    for i, v in enumerate(order):
        later = [pos[x] for x in bags[i] if x != v]
        parent.append(min(later) if later else -1)
    roots = [i for i, p in enumerate(parent) if p < 0]
    for r in roots[:-1]:
        parent[r] = roots[-1]
    return TreeDecomposition(bags, parent, roots[-1])


@dataclass
class DecompositionReport:
    valid: bool
    width: int
    bag_sizes: list[int]
    violations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"valid": self.valid, "width": self.width,
                "max_bag": max(self.bag_sizes, default=0), "bags": len(self.bag_sizes),
                "violations": self.violations}


def _tree_violations(d: TreeDecomposition) -> list[str]:
    k = len(d.bags)
    out = []
    if len(d.parent) != k:
        return [f"structure: {k} bags but {len(d.parent)} parent links"]
    roots = [i for i, p in enumerate(d.parent) if p < 0]
    if roots != [d.root]:
        out.append(f"structure: roots {roots} do not match declared root {d.root}")
    for i, p in enumerate(d.parent):
        if p >= k:
            out.append(f"structure: bag {i} has out-of-range parent {p}")
    if out:
        return out
    state = [0] * k
    for i in range(k):
        trail, x = [], i
        while x >= 0 and state[x] == 0:
            state[x] = 1
            trail.append(x)
            x = d.parent[x]
        if x >= 0 and state[x] == 1:
            out.append(f"structure: cycle through bag {x}")
            break
        for t in trail:
            state[t] = 2
    return out


def validate_decomposition(h: MetricGraph, d: TreeDecomposition,
                           edges: Iterable[Sequence] | None = None) -> DecompositionReport:
    """Check coverage of vertices, coverage of edges and connectivity of occurrences."""
    sizes = [len(b) for b in d.bags]
    violations = _tree_violations(d)
    where: dict[int, list[int]] = {}
    for i, bag in enumerate(d.bags):
        for v in bag:
            where.setdefault(v, []).append(i)
    for v in range(h.n):
        if v not in where:
            violations.append(f"property 1: vertex {v} is in no bag")
    for v in where:
        if not 0 <= v < h.n:
            violations.append(f"property 1: bag vertex {v} is not a host vertex")
    sets = [set(b) for b in d.bags]
    for e in (edges if edges is not None else h.edges):
        u, v = int(e[0]), int(e[1])
        cand = where.get(u, [])
        if not any(v in sets[i] for i in cand):
            violations.append(f"property 2: edge ({u}, {v}) is in no bag")
    if not any(s.startswith("structure") for s in violations):
        for v, occ in where.items():
            tops = [i for i in occ if d.parent[i] < 0 or v not in sets[d.parent[i]]]
            if len(tops) != 1:
                violations.append(f"property 3: bags holding vertex {v} form {len(tops)} components")
    return DecompositionReport(not violations, d.width, sizes, violations)


def restrict_decomposition(d: TreeDecomposition, keep: Iterable[int]) -> TreeDecomposition:
    """Drop vertices outside ``keep`` and splice out bags that become empty.

    No vertex can occur on both sides of an empty bag, so the remaining
    pieces may be re-linked in any tree shape.
    """
    keep = set(keep)
    bags = [[v for v in b if v in keep] for b in d.bags]
    alive = [i for i, b in enumerate(bags) if b]
    if not alive:
        return TreeDecomposition([[]], [-1], 0)
    new_id = {old: k for k, old in enumerate(alive)}

    def live_parent(i: int) -> int:
        p = d.parent[i]
        while p >= 0 and not bags[p]:
            p = d.parent[p]
        return p

    parent = []
    for i in alive:
        p = live_parent(i)
        parent.append(new_id[p] if p >= 0 else -1)
    roots = [k for k, p in enumerate(parent) if p < 0]
    for r in roots[1:]:
        parent[r] = roots[0]
    return TreeDecomposition([bags[i] for i in alive], parent, roots[0])
