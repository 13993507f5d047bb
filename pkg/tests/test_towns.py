import pytest

from hwroute.cover import build_ladder
from hwroute.metric import MetricGraph, canonical_scale
from hwroute.oracle import audit_towns, canonical_path, floyd_warshall
from hwroute.oracle import _adjacency
from hwroute.towns import Town, TownTree, build_core_hubs, build_net, build_towns


def _tree(scaled):
    gs, params = scaled
    ladder = build_ladder(gs, params)
    return gs, ladder, build_core_hubs(build_towns(gs, ladder), ladder)


def test_star_towns(scaled_star):
    gs, ladder, tree = _tree(scaled_star)
    shapes = sorted((t.sorted_vertices(), t.level) for t in tree.towns)
    assert shapes == [([0], 0), ([0, 1, 2, 3], 4), ([1], 0), ([2], 0), ([3], 0)]
    root = tree[tree.root]
    assert len(root.children) == 4
    assert root.core_hubs == [0]
    assert all(tree[t].core_hubs == [] for t in tree.leaves)
    assert audit_towns(gs, tree, ladder).ok


def test_single_vertex_town():
    g = MetricGraph(1, [])
    gs, params = canonical_scale(g)
    ladder = build_ladder(gs, params)
    tree = build_towns(gs, ladder)
    assert len(tree) == 1
    assert tree.leaves == [tree.root]


def test_two_cluster_towns(scaled_clusters):
    gs, ladder, tree = _tree(scaled_clusters)
    pairs = [t for t in tree.towns if t.size == 2]
    assert sorted(t.sorted_vertices() for t in pairs) == [[0, 1], [2, 3]]
    for t in pairs:
        assert ladder.params.r(t.level) >= 4.04
        assert ladder.params.r(t.level) < 101
    root = tree[tree.root]
    assert root.size == 4 and sorted(root.children) == sorted(t.id for t in pairs)
    d = floyd_warshall(gs.n, gs.edges)
    adj = _adjacency(gs.n, gs.edges)
    path = canonical_path(gs.n, adj, d, 0, 3)
    assert set(path) & set(root.core_hubs)
    assert audit_towns(gs, tree, ladder).ok


def test_net_examples():
    line = MetricGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    assert build_net(range(4), 1.5, line).selected == [0, 2]
    assert build_net(range(4), 0, line).selected == [0, 1, 2, 3]
    assert build_net([2], 10.0, line).selected == [2]
    forced = build_net(range(4), 1.5, line, must_contain=[1])
    assert forced.selected == [1, 3]
    with pytest.raises(ValueError):
        build_net([0, 1], 1.0, line, must_contain=[3])


def test_audit_flags_outside_vertex_too_close(scaled_star):
    gs, ladder, tree = _tree(scaled_star)
    forged = TownTree([Town(0, frozenset([1]), 3, 0.0, 1), Town(1, frozenset(range(4)), 4, 8.08)],
                      1, 4)
    forged.towns[1].children = [0]
    rep = audit_towns(gs, forged, ladder)
    assert any("isolation" in v for v in rep.violations)
    assert any("exactly one child" in v for v in rep.violations)


def test_audit_flags_one_child_root(scaled_star):
    gs, ladder, tree = _tree(scaled_star)
    root = tree[tree.root]
    keep = root.children[0]
    root.children = [keep]
    rep = audit_towns(gs, tree, ladder)
    assert any("exactly one child" in v for v in rep.violations)
