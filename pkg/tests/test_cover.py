import itertools

import pytest

from hwroute.cover import build_cover, build_ladder, enumerate_paths, measure_sparsity
from hwroute.metric import MetricGraph, canonical_scale
from hwroute.oracle import audit_cover


def test_star_bucket_at_r2(scaled_star):
    gs, _ = scaled_star
    bucket = enumerate_paths(gs, 2.0, 8.0)
    assert sorted((u, v) for u, v, _, _ in bucket.entries()) == [(0, 1), (0, 2), (0, 3)]
    assert all(p[0] == 0 for _, _, p, _ in bucket.entries())


def test_star_bucket_empty_at_large_radius(scaled_star):
    gs, _ = scaled_star
    assert len(enumerate_paths(gs, 16.0, 8.0)) == 0
    assert len(enumerate_paths(gs, 100.0, 8.0)) == 0


def test_star_cover_is_the_hub(scaled_star):
    gs, _ = scaled_star
    assert build_cover(gs, 2.0, 8.0) == [0]
    assert build_cover(gs, 16.0, 8.0) == []


def _minimal_hitting_sets(paths, n):
    out = []
    for size in range(1, n + 1):
        for cand in itertools.combinations(range(n), size):
            if all(set(p) & set(cand) for p in paths) and not any(set(m) <= set(cand) for m in out):
                out.append(cand)
    return out


def test_two_cluster_cover_hits_both_clusters(scaled_clusters):
    gs, _ = scaled_clusters
    cover = build_cover(gs, 2.0, 8.0)
    assert len(cover) == 2
    assert set(cover) & {0, 1} and set(cover) & {2, 3}
    paths = [p for _, _, p, _ in enumerate_paths(gs, 2.0, 8.0).entries()]
    minimal = _minimal_hitting_sets(paths, gs.n)
    assert tuple(sorted(cover)) in minimal
    assert min(len(m) for m in minimal) == 2


def test_star_ladder(scaled_star):
    gs, params = scaled_star
    ladder = build_ladder(gs, params)
    assert ladder.hubs == [[], [0], [0], [0], []]
    assert measure_sparsity(gs, ladder) == [0, 1, 1, 1, 0]
    assert audit_cover(gs, ladder).ok


def test_single_edge_ladder():
    gs, params = canonical_scale(MetricGraph(2, [(0, 1, 3.0)]))
    ladder = build_ladder(gs, params)
    assert len(ladder.hubs) == params.r_max_index + 1
    assert ladder.hubs[0] == [] and ladder.hubs[-1] == []
    # 4.04 lies in (2, 8] and in (4, 16]
    assert [len(h) for h in ladder.hubs] == [0, 1, 1, 0]


def test_two_cluster_sparsity(scaled_clusters):
    gs, params = scaled_clusters
    ladder = build_ladder(gs, params)
    assert measure_sparsity(gs, ladder)[1] == 1
    assert audit_cover(gs, ladder).ok


def test_audit_flags_missing_and_redundant_hubs(scaled_star):
    gs, params = scaled_star
    ladder = build_ladder(gs, params)
    ladder.hubs[1] = []
    ladder.hubs[2] = [0, 1]
    rep = audit_cover(gs, ladder)
    assert any("has no hub" in v for v in rep.violations)
    assert any("hub 1 is redundant" in v for v in rep.violations)
