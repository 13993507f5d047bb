import numpy as np
import pytest

from hwroute.cover import build_ladder
from hwroute.decomposition import TreeDecomposition, single_bag, validate_decomposition
from hwroute.embed import (augment_depot_safety, band_membership, embed_bounded_diameter,
                           embed_multi_depot, embed_single_depot, prepare_rooted)
from hwroute.metric import GraphError, MetricGraph, canonical_scale, diameter, leq
from hwroute.oracle import audit_embedding
from hwroute.towns import build_core_hubs, build_towns


def _towns(gs, params):
    ladder = build_ladder(gs, params)
    return build_core_hubs(build_towns(gs, ladder), ladder)


def test_star_augmentation_counts(scaled_star):
    gs, _ = scaled_star
    gp, rec = augment_depot_safety(gs, [0], eta_hint=1)
    assert (rec.a, rec.b, rec.copies) == (3, 4, 4)
    assert sorted(rec.added) == [(0, 3), (0, 4)]
    assert rec.count == 8 and gp.n == 12
    for i in (3, 4):
        for v in rec.added[(0, i)]:
            assert gp.edge_weight(0, v) == 2.0 ** i
    assert np.array_equal(gp.dist[:4, :4], gs.dist)


def test_augmentation_rejects_bad_hint(scaled_star):
    gs, _ = scaled_star
    with pytest.raises(GraphError):
        augment_depot_safety(gs, [0], eta_hint=0)
    with pytest.raises(GraphError):
        augment_depot_safety(gs, [], eta_hint=1)


def test_depot_only_in_trivial_towns(scaled_star):
    gs, _ = scaled_star
    prep = prepare_rooted(gs, [0])
    for t in prep.tree.towns:
        if 0 in t.vertices:
            assert t.size == 1 or t.id == prep.tree.root


def test_star_bounded_diameter_is_exact(scaled_star):
    gs, params = scaled_star
    emb = embed_bounded_diameter(gs, _towns(gs, params), 0.25)
    assert np.allclose(emb.host.dist, gs.dist)
    assert validate_decomposition(emb.host, emb.decomposition).valid
    audit = audit_embedding(gs, emb.host, "diam", {"eps": 0.25, "delta": diameter(gs)})
    assert audit.ok and audit.max_additive_error == pytest.approx(0.0)


def test_huge_eps_gives_single_star(scaled_clusters):
    gs, params = scaled_clusters
    delta = diameter(gs)
    emb = embed_bounded_diameter(gs, _towns(gs, params), 1.0, delta)
    degrees = [sum(1 for _ in emb.host.neighbors(v)) for v in range(gs.n)]
    assert sorted(degrees) == [1, 1, 1, 3]
    assert (emb.host.dist - gs.dist).max() <= 2 * delta


def test_two_cluster_small_eps_audit(scaled_clusters):
    gs, params = scaled_clusters
    delta = diameter(gs)
    emb = embed_bounded_diameter(gs, _towns(gs, params), 0.01, delta)
    assert audit_embedding(gs, emb.host, "diam", {"eps": 0.01, "delta": delta}).ok
    assert validate_decomposition(emb.host, emb.decomposition).valid


def test_host_edges_are_guest_distances(scaled_clusters):
    gs, _ = scaled_clusters
    emb = embed_multi_depot(gs, [0, 2], 0.5)
    for u, v, w in emb.host.edges:
        assert w == emb.guest.d(u, v)


def test_single_depot_triangle():
    gs, _ = canonical_scale(MetricGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)]))
    emb = embed_single_depot(gs, 0, 0.5)
    for t in emb.tree.towns:
        if 0 in t.vertices:
            assert t.size == 1 or t.id == emb.tree.root
    audit = audit_embedding(gs, emb.host, "depot", {"epsilon_hat": 0.5, "depots": [0]})
    assert audit.ok and audit.lower_violations == 0
    assert validate_decomposition(emb.host, emb.decomposition).valid


def test_depot_in_every_band_and_adjacent_to_all(scaled_clusters):
    gs, _ = scaled_clusters
    emb = embed_single_depot(gs, 1, 0.5)
    assert all(1 in band for band in emb.bands.values())
    nbrs = {v for v, _ in emb.host.neighbors(1)}
    assert set(range(emb.host.n)) - {1} <= nbrs


def test_band_nesting_and_interval(scaled_clusters):
    gs, _ = scaled_clusters
    emb = embed_single_depot(gs, 0, 0.25)
    ds = emb.guest.dist[0]
    for k in sorted(emb.bands):
        if k + 1 in emb.bands:
            for v in emb.bands[k + 1]:
                if leq(ds[v], 2.0 ** k):
                    assert v in emb.bands[k]
    for ks in band_membership(emb).values():
        assert ks == list(range(ks[0], ks[-1] + 1))


def test_multi_depot_two_clusters(scaled_clusters):
    gs, _ = scaled_clusters
    emb = embed_multi_depot(gs, [0, 2], 0.5)
    audit = audit_embedding(gs, emb.host, "multi",
                            {"epsilon_hat": 0.5, "depots": [0, 2], "eps": emb.epsilon})
    assert audit.ok
    for band in emb.bands.values():
        assert {0, 2} <= set(band)


def test_single_depot_matches_one_depot_multi(scaled_clusters):
    gs, _ = scaled_clusters
    a = embed_single_depot(gs, 0, 0.5)
    b = embed_multi_depot(gs, [0], 0.5)
    assert a.host.edges == b.host.edges
    assert a.decomposition.bags == b.decomposition.bags


def test_nonpositive_accuracy_rejected(scaled_star):
    gs, _ = scaled_star
    with pytest.raises(GraphError):
        embed_single_depot(gs, 0, 0.0)


def test_validator_examples(scaled_star):
    gs, params = scaled_star
    emb = embed_bounded_diameter(gs, _towns(gs, params), 0.25)
    rep = validate_decomposition(emb.host, emb.decomposition)
    assert rep.valid and rep.width == 1
    whole = validate_decomposition(gs, single_bag(gs.n))
    assert whole.valid and whole.width == gs.n - 1
    broken = TreeDecomposition([[0, 1], [0, 2], [3]], [-1, 0, 0], 0)
    bad = validate_decomposition(gs, broken)
    assert not bad.valid
    assert any("edge (0, 3)" in v for v in bad.violations)
