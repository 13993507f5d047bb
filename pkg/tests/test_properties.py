"""Randomised invariants checked with hypothesis."""
import json

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hwroute.cover import build_ladder
from hwroute.cvr import VrpInstance, solve_cvr
from hwroute.decomposition import elimination_decomposition, validate_decomposition
from hwroute.embed import augment_depot_safety, embed_multi_depot
from hwroute.io import Instance, dumps_instance, parse_instance
from hwroute.metric import MetricGraph, canonical_scale, leq, path_length, shortest_path
from hwroute.nice import LEAF, make_nice
from hwroute.oracle import audit_cover, audit_embedding, audit_towns, brute_cvr
from hwroute.pipelines import lower_bound_cvr
from hwroute.towns import build_core_hubs, build_towns

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, min_n=2, max_n=9, integer=False):
    n = draw(st.integers(min_n, max_n))
    weight = (st.integers(1, 9).map(float) if integer
              else st.floats(0.5, 10.0, allow_nan=False).map(lambda x: round(x, 3)))
    edges = [(draw(st.integers(0, v - 1)), v, draw(weight)) for v in range(1, n)]
    for _ in range(draw(st.integers(0, n))):
        u, v = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if u != v:
            edges.append((u, v, draw(weight)))
    return MetricGraph(n, edges)


@FAST
@given(graphs())
def test_distance_is_a_metric(g):
    d = g.dist
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    for w in range(g.n):
        assert np.all(d <= d[:, [w]] + d[[w], :] + 1e-9 * np.maximum(1, d))


@FAST
@given(graphs(), st.data())
def test_paths_realise_distances(g, data):
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    p = shortest_path(g, u, v)
    assert p[0] == u and p[-1] == v
    assert abs(path_length(g, p) - g.d(u, v)) <= 1e-9 * max(1.0, g.d(u, v))


@FAST
@given(graphs())
def test_scaling_puts_min_distance_in_band(g):
    gs, params = canonical_scale(g)
    d = gs.dist[np.triu_indices(gs.n, k=1)]
    assert params.c / 2 < d.min() <= 0.51 * params.c


@FAST
@given(graphs(max_n=8))
def test_cover_and_towns_audit_clean(g):
    gs, params = canonical_scale(g)
    ladder = build_ladder(gs, params)
    assert ladder.hubs[0] == [] and ladder.hubs[-1] == []
    assert audit_cover(gs, ladder).ok
    tree = build_core_hubs(build_towns(gs, ladder), ladder)
    assert audit_towns(gs, tree, ladder).ok


@FAST
@given(graphs(max_n=8), st.data(), st.sampled_from([0.5, 0.25]))
def test_multi_depot_embedding_bounds(g, data, eh):
    gs, _ = canonical_scale(g, epsilon_hat=eh)
    depots = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=3))
    emb = embed_multi_depot(gs, depots, eh)
    for u, v, w in emb.host.edges:
        assert w == emb.guest.d(u, v)
    audit = audit_embedding(gs, emb.host, "multi",
                            {"epsilon_hat": eh, "depots": sorted(depots), "eps": emb.epsilon})
    assert audit.ok
    assert validate_decomposition(emb.host, emb.decomposition).valid


@FAST
@given(graphs(max_n=8), st.data(), st.integers(1, 3))
def test_augmentation_preserves_distances(g, data, eta):
    gs, _ = canonical_scale(g)
    depots = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=3))
    gp, rec = augment_depot_safety(gs, depots, eta)
    assert np.array_equal(gp.dist[:g.n, :g.n], gs.dist)
    assert rec.count == (eta + len(depots)) ** 2 * len(depots) * (rec.b - rec.a + 1)


@FAST
@given(graphs(max_n=7, integer=True), st.data())
def test_solver_matches_oracle_and_lower_bound(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    others = [v for v in range(g.n) if v != s]
    clients = data.draw(st.lists(st.sampled_from(others), unique=True, max_size=4))
    q = data.draw(st.integers(1, 3))
    dem = {c: data.draw(st.integers(1, q)) for c in clients}
    inst = VrpInstance(g, [s], dem, q)
    ts = solve_cvr(inst, make_nice(elimination_decomposition(g), [s], graph=g))
    assert ts.total == brute_cvr(g, [s], dem, q).cost
    assert leq(lower_bound_cvr(inst), ts.total)


@FAST
@given(graphs(max_n=6), st.data())
def test_nice_refinement_forgets_each_vertex_once(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    nice = make_nice(elimination_decomposition(g), [s], graph=g)
    assert nice.check() == []
    assert sorted(nice.forgotten_vertices()) == list(range(g.n))
    leaves = [nd for nd in nice.nodes if nd.kind == LEAF]
    assert leaves
    assert all(len(nd.bag) == 1 for nd in leaves)


@FAST
@given(graphs(max_n=6), st.integers(0, 10**6))
def test_instance_round_trip(g, seed):
    inst = Instance(g, "kcenter", k=2, seed=seed)
    text = dumps_instance(inst)
    assert dumps_instance(parse_instance(json.loads(text))) == text
