import random

import pytest

from hwroute.centers import solve_kcenter_td, solve_kmedian_td
from hwroute.decomposition import elimination_decomposition, single_bag
from hwroute.generators import random_connected
from hwroute.oracle import brute_kcenter, brute_kmedian

from conftest import path3, two_clusters


def test_path_kcenter():
    g = path3()
    sol = solve_kcenter_td(g, single_bag(3), 1)
    assert sol.centers == [1] and sol.value == 1


def test_path_kmedian():
    g = path3()
    sol = solve_kmedian_td(g, single_bag(3), 1)
    assert sol.centers == [1] and sol.value == 2


def test_k_equals_n_is_free():
    g = path3()
    assert solve_kcenter_td(g, single_bag(3), 3).value == 0
    assert solve_kmedian_td(g, single_bag(3), 3).value == 0


def test_two_clusters():
    g = two_clusters()
    d = elimination_decomposition(g)
    kc = solve_kcenter_td(g, d, 2)
    assert kc.value == 1
    assert len(set(kc.centers) & {0, 1}) == 1 and len(set(kc.centers) & {2, 3}) == 1
    assert solve_kmedian_td(g, d, 2).value == 2


def test_coverable_and_candidates_restrict():
    g = path3()
    sol = solve_kcenter_td(g, single_bag(3), 1, coverable=[0, 1], candidates=[0, 2])
    assert sol.centers == [0] and sol.value == 1


@pytest.mark.parametrize("seed", range(15))
def test_random_against_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    g = random_connected(n, seed, integer=seed % 2 == 1)
    k = rng.randint(1, 3)
    d = elimination_decomposition(g)
    weights = {v: float(rng.randint(0, 3)) for v in range(n)}
    kc = solve_kcenter_td(g, d, k)
    assert kc.value == pytest.approx(brute_kcenter(g, k).cost)
    km = solve_kmedian_td(g, d, k, weights=weights)
    assert km.value == pytest.approx(brute_kmedian(g, k, weights=weights).cost)
    assert len(km.centers) <= k
