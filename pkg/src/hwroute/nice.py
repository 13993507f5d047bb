"""Nice tree decompositions (leaf / introduce / forget / join)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .decomposition import TreeDecomposition, validate_decomposition
from .metric import MetricGraph

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass
class NiceNode:
    kind: str
    bag: tuple
    vertex: int = -1
    children: list[int] = field(default_factory=list)


@dataclass
class NiceDecomposition:
    """Nodes are stored children-first, so a forward scan is a valid bottom-up order."""

    nodes: list[NiceNode]
    root: int
    depots: list[int] = field(default_factory=list)

    @property
    def width(self) -> int:
        return max((len(nd.bag) for nd in self.nodes), default=0) - 1

    def __len__(self):
        return len(self.nodes)

    def check(self) -> list[str]:
        """Structural self-check: node shapes and the forget-once rule."""
        out = []
        forgotten: dict[int, int] = {}
        for i, nd in enumerate(self.nodes):
            kids = [self.nodes[c] for c in nd.children]
            if nd.kind == LEAF:
                if kids or len(nd.bag) != 1:
                    out.append(f"leaf {i} must hold one vertex and no children")
            elif nd.kind == INTRODUCE:
                if len(kids) != 1 or set(nd.bag) != set(kids[0].bag) | {nd.vertex} \
                        or nd.vertex in kids[0].bag:
                    out.append(f"introduce {i} is malformed")
            elif nd.kind == FORGET:
                if len(kids) != 1 or set(nd.bag) != set(kids[0].bag) - {nd.vertex} \
                        or nd.vertex not in kids[0].bag:
                    out.append(f"forget {i} is malformed")
                if nd.vertex in forgotten:
                    out.append(f"vertex {nd.vertex} forgotten twice")
                forgotten[nd.vertex] = i
            elif nd.kind == JOIN:
                if len(kids) != 2 or any(k.bag != nd.bag for k in kids):
                    out.append(f"join {i} is malformed")
            if any(c >= i for c in nd.children):
                out.append(f"node {i} precedes one of its children")
        if self.nodes and self.nodes[self.root].bag:
            out.append("root bag is not empty")
        return out

    def forgotten_vertices(self) -> list[int]:
        return [nd.vertex for nd in self.nodes if nd.kind == FORGET]


class DecompositionInvalid(ValueError):
    pass


def make_nice(d: TreeDecomposition, depots: Iterable[int] = (),
              graph: MetricGraph | None = None) -> NiceDecomposition:
    """Refine ``d`` into a nice decomposition whose root forgets the depots last.

    Depots are added to every bag first.  With ``graph`` given, ``d`` is
    validated against it and a violation raises ``DecompositionInvalid``.
    """
    if graph is not None:
        rep = validate_decomposition(graph, d)
        if not rep.valid:
            raise DecompositionInvalid("; ".join(rep.violations[:10]))
    dep = sorted(set(int(s) for s in depots))
    bags = [tuple(sorted(set(b) | set(dep))) for b in d.bags]
    if any(not b for b in bags):
        raise DecompositionInvalid("empty bag in decomposition")
    kids = d.children()
    nodes: list[NiceNode] = []

    def add(kind, bag, vertex=-1, children=()):
        nodes.append(NiceNode(kind, tuple(bag), vertex, list(children)))
        return len(nodes) - 1

    def morph(node: int, src: tuple, dst: tuple) -> int:
        cur = set(src)
        for v in sorted(set(src) - set(dst)):
            cur.discard(v)
            node = add(FORGET, sorted(cur), v, [node])
        for v in sorted(set(dst) - set(src)):
            cur.add(v)
            node = add(INTRODUCE, sorted(cur), v, [node])
        return node

    built: dict[int, int] = {}
    stack = [(d.root, False)]
    while stack:
        x, ready = stack.pop()
        if not ready:
            stack.append((x, True))
            stack.extend((c, False) for c in reversed(kids[x]))
            continue
        bag = bags[x]
        if not kids[x]:
            node = add(LEAF, (bag[0],), bag[0])
            built[x] = morph(node, (bag[0],), bag)
            continue
        tops = [morph(built[c], bags[c], bag) for c in kids[x]]
        node = tops[0]
        for t in tops[1:]:
            node = add(JOIN, bag, -1, [node, t])
        built[x] = node
    root_bag = bags[d.root]
    node = built[d.root]
    order = [v for v in root_bag if v not in dep] + [v for v in root_bag if v in dep]
    cur = set(root_bag)
    for v in order:
        cur.discard(v)
        node = add(FORGET, sorted(cur), v, [node])
    return NiceDecomposition(nodes, node, dep)
