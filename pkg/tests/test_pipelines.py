import random

import pytest

from hwroute.cvr import VrpInstance
from hwroute.generators import random_connected
from hwroute.metric import MetricGraph
from hwroute.oracle import brute_cvr, brute_kcenter, brute_kmedian
from hwroute.pipelines import (fpa_kcenter, fpa_kmedian, gonzalez_2approx, kcenter_radius,
                               kmedian_cost, local_search_kmedian, lower_bound_cvr, ptas_cvr,
                               ptas_cvr_multi)

from conftest import path3, triangle, two_clusters


def test_lower_bound_examples():
    assert lower_bound_cvr(VrpInstance(triangle(), [0], {1: 1, 2: 1}, 2)) == 2
    assert lower_bound_cvr(VrpInstance(triangle(), [0], {}, 2)) == 0
    g = random_connected(7, 3)
    inst = VrpInstance(g, [0], {c: 1 for c in range(1, 7)}, 1)
    assert lower_bound_cvr(inst) == pytest.approx(brute_cvr(g, [0], inst.demands, 1).cost)


def test_triangle_ptas_is_optimal():
    inst = VrpInstance(triangle(), [0], {1: 1, 2: 1}, 2)
    tours, rep = ptas_cvr(inst, 0.5)
    assert tours.total == pytest.approx(3)
    assert rep.lower_bound == 2 and rep.guest_cost == pytest.approx(3)
    assert rep.host_cost >= rep.guest_cost - 1e-9
    assert set(rep.stage_seconds) >= {"embed", "nice", "solve", "lift"}


def test_random_ptas_within_envelope():
    rng = random.Random(7)
    g = random_connected(10, 7)
    clients = rng.sample(range(1, 10), 6)
    inst = VrpInstance(g, [0], {c: rng.randint(1, 2) for c in clients}, 2)
    tours, rep = ptas_cvr(inst, 0.3)
    opt = brute_cvr(g, [0], inst.demands, 2).cost
    assert opt <= tours.total <= 1.3 * opt
    assert tours.total >= lower_bound_cvr(inst) - 1e-9


def test_penalty_pipeline_reports_original_units():
    g = MetricGraph(3, [(0, 1, 10), (0, 2, 1)])
    inst = VrpInstance(g, [0], {1: 1, 2: 1}, 2, {1: 0.1, 2: 100})
    tours, rep = ptas_cvr(inst, 0.5)
    assert rep.problem == "cvr-pen"
    assert tours.skipped == [1] and tours.total == pytest.approx(2.1)


def test_multi_depot_stays_local():
    g = two_clusters()
    inst = VrpInstance(g, [0, 3], {1: 1, 2: 1}, 1)
    tours, rep = ptas_cvr_multi(inst, 0.5)
    assert tours.total == pytest.approx(4)
    assert tours.total == pytest.approx(brute_cvr(g, [0, 3], inst.demands, 1).cost)
    for t in tours.tours:
        assert not ({1, 2} <= set(t.walk))
    assert tours.total >= lower_bound_cvr(inst) - 1e-9


def test_one_depot_multi_matches_single():
    g = random_connected(8, 2)
    inst = VrpInstance(g, [0], {3: 1, 5: 1, 6: 2}, 2)
    a, _ = ptas_cvr(inst, 0.5)
    b, _ = ptas_cvr_multi(inst, 0.5)
    assert a.total == pytest.approx(b.total)


def test_gonzalez_examples():
    assert gonzalez_2approx(path3(), 1) == [0]
    assert kcenter_radius(path3(), [0]) == 2
    assert kcenter_radius(path3(), gonzalez_2approx(path3(), 5)) == 0
    pick = gonzalez_2approx(two_clusters(), 2)
    assert len(set(pick) & {0, 1}) == 1 and len(set(pick) & {2, 3}) == 1


def test_fpa_examples():
    centers, rep = fpa_kcenter(path3(), 1, 0.5)
    assert kcenter_radius(path3(), centers) <= 1.5
    assert rep.seed_cost == 2
    assert fpa_kcenter(path3(), 3, 0.5)[1].guest_cost == 0
    centers, rep = fpa_kmedian(path3(), 1, 0.5)
    assert kmedian_cost(path3(), centers) <= 3
    assert fpa_kmedian(path3(), 3, 0.5)[1].guest_cost == 0


def test_fpa_random_ten_vertices():
    g = random_connected(10, 11)
    centers, _ = fpa_kcenter(g, 2, 0.3)
    assert kcenter_radius(g, centers) <= 1.3 * brute_kcenter(g, 2).cost + 1e-9
    centers, _ = fpa_kmedian(g, 2, 0.3)
    assert kmedian_cost(g, centers) <= 1.3 * brute_kmedian(g, 2).cost + 1e-9


def test_local_search_never_worsens():
    g = random_connected(9, 5)
    start = gonzalez_2approx(g, 3)
    better = local_search_kmedian(g, 3, start)
    assert kmedian_cost(g, better) <= kmedian_cost(g, start)
