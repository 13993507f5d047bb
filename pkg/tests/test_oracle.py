import numpy as np
import pytest

from hwroute.generators import random_connected
from hwroute.metric import MetricGraph
from hwroute.oracle import (CVR_CLIENT_LIMIT, OracleGuardError, audit_embedding, bell_number,
                            brute_cvr, brute_kcenter, brute_kmedian, floyd_warshall)

from conftest import path3, triangle, two_clusters


def test_brute_cvr_examples():
    g = triangle()
    res = brute_cvr(g, [0], {1: 1, 2: 1}, 2)
    assert res.cost == 3 and res.search_space == bell_number(2)
    assert brute_cvr(g, [0], {1: 1}, 2).cost == 2
    h = random_connected(6, 1)
    dem = {c: 1 for c in range(1, 6)}
    d = floyd_warshall(h.n, h.edges)
    assert brute_cvr(h, [0], dem, 1).cost == pytest.approx(2 * d[0, 1:].sum())


def test_guard_is_a_hard_error():
    g = random_connected(12, 0)
    dem = {c: 1 for c in range(1, CVR_CLIENT_LIMIT + 2)}
    with pytest.raises(OracleGuardError):
        brute_cvr(g, [0], dem, 2)


def test_bell_numbers():
    assert [bell_number(m) for m in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_brute_centres():
    kc = brute_kcenter(path3(), 1)
    assert kc.cost == 1 and kc.solution == [1]
    assert brute_kmedian(path3(), 1).cost == 2
    assert brute_kcenter(path3(), 3).cost == 0 and brute_kmedian(path3(), 3).cost == 0
    assert brute_kcenter(two_clusters(), 2).cost == 1
    assert brute_kmedian(two_clusters(), 2).cost == 2
    assert brute_kcenter(two_clusters(), 2).search_space == 6


def test_identity_audit():
    g = random_connected(7, 4)
    rep = audit_embedding(g, g, "identity", {})
    assert rep.ok and rep.worst_slack == 0 and rep.max_additive_error == 0


def test_corrupted_host_edge_flagged():
    g = MetricGraph(3, [(0, 1, 2), (1, 2, 2)])
    h = MetricGraph(3, [(0, 1, 1), (1, 2, 2)])
    rep = audit_embedding(g, h, "identity", {})
    assert not rep.ok and rep.lower_violations >= 1
    assert rep.worst_pair == (0, 1)


def test_floyd_warshall_matches_graph():
    g = random_connected(9, 8, integer=False)
    assert np.allclose(floyd_warshall(g.n, g.edges), g.dist)
