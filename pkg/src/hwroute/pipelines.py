"""End-to-end approximation drivers: embed, solve exactly on the host, lift back."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .centers import solve_kcenter_td, solve_kmedian_td
from .cvr import Tour, TourSet, VrpInstance, solve_cvr, solve_cvr_penalties
from .embed import HostEmbedding, embed_multi_depot, embed_single_depot
from .metric import GraphError, MetricGraph, canonical_scale, shortest_path
from .nice import make_nice


@dataclass
class PipelineReport:
    problem: str
    guest_cost: float
    host_cost: float
    lower_bound: float | None
    epsilon_hat: float
    width: int
    stage_seconds: dict[str, float] = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    brute_cost: float | None = None
    seed_cost: float | None = None

    @property
    def ratio(self) -> float | None:
        if self.brute_cost is None:
            return None
        if self.brute_cost == 0:
            return 1.0 if self.guest_cost == 0 else math.inf
        return self.guest_cost / self.brute_cost

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["ratio"] = self.ratio
        out["bound_slack"] = (None if self.brute_cost is None
                              else (1 + self.epsilon_hat) * self.brute_cost - self.guest_cost)
        return out


class _Clock:
    def __init__(self):
        self.times: dict[str, float] = {}
        self._t = time.perf_counter()

    def lap(self, name: str):
        now = time.perf_counter()
        self.times[name] = self.times.get(name, 0.0) + now - self._t
        self._t = now


# -- vehicle routing -------------------------------------------------------

def lower_bound_cvr(inst: VrpInstance) -> float:
    """``(2/Q) sum d(c, s)`` for one depot, ``(1/Q) sum d(c, S)`` for several."""
    if not inst.clients:
        return 0.0
    dist = inst.graph.dist
    total = sum(float(dist[inst.depots, c].min()) for c in inst.clients)
    factor = 2.0 if len(inst.depots) == 1 else 1.0
    return factor * total / inst.capacity


def lift(tours: TourSet, g: MetricGraph) -> TourSet:
    """Re-route every tour in ``g`` visiting the same clients in the same order."""
    out = []
    for t in tours.tours:
        stops = [t.start] + list(t.clients) + [t.end]
        walk = [t.start]
        cost = 0.0
        for a, b in zip(stops, stops[1:]):
            if a == b:
                continue
            cost += g.d(a, b)
            walk.extend(shortest_path(g, a, b)[1:])
        out.append(Tour(t.start, t.end, list(t.clients), walk, t.load, cost))
    penalty = tours.penalty
    return TourSet(out, sum(t.cost for t in out), list(tours.skipped), penalty)


def _embed_for(inst: VrpInstance, epsilon_hat: float, eta_hint: int, c: float,
               distortion_constant: float, multi: bool) -> tuple[HostEmbedding, float]:
    gs, params = canonical_scale(inst.graph, c, epsilon_hat, distortion_constant)
    if multi:
        emb = embed_multi_depot(gs, inst.depots, epsilon_hat, eta_hint, c, distortion_constant)
    else:
        if len(inst.depots) != 1:
            raise GraphError("single-depot pipeline needs exactly one depot")
        emb = embed_single_depot(gs, inst.depots[0], epsilon_hat, eta_hint, c,
                                 distortion_constant)
    return emb, params.scale_factor


def _ptas(inst: VrpInstance, epsilon_hat: float, eta_hint: int, c: float,
          distortion_constant: float, multi: bool, problem: str):
    clock = _Clock()
    emb, scale = _embed_for(inst, epsilon_hat, eta_hint, c, distortion_constant, multi)
    clock.lap("embed")
    pend = emb.augmentation.pendants if emb.augmentation else []
    hinst = inst.with_graph(emb.host, excluded=pend)
    nice = make_nice(emb.decomposition, inst.depots)
    clock.lap("nice")
    if inst.penalties is not None:
        hinst.penalties = {v: p * scale for v, p in inst.penalties.items()}
        host = solve_cvr_penalties(hinst, nice)
    else:
        host = solve_cvr(hinst, nice)
    clock.lap("solve")
    lifted = lift(host, inst.graph)
    if inst.penalties is not None:
        lifted.penalty = sum(inst.penalties[v] for v in lifted.skipped)
    clock.lap("lift")
    rep = PipelineReport(problem, lifted.total, host.cost / scale + lifted.penalty,
                         lower_bound_cvr(inst), epsilon_hat, emb.width, clock.times,
                         {"c": c, "eta_hint": eta_hint, "distortion_constant": distortion_constant,
                          "scale_factor": scale, "epsilon": emb.epsilon,
                          "host_vertices": emb.host.n, "depots": inst.depots})
    return lifted, rep


def ptas_cvr(inst: VrpInstance, epsilon_hat: float, eta_hint: int = 1, c: float = 8.0,
             distortion_constant: float = 32.0) -> tuple[TourSet, PipelineReport]:
    """Single-depot routing through the depot-rooted embedding.

    With penalties on the instance the penalty-aware solver runs instead.
    """
    tag = "cvr-pen" if inst.penalties is not None else "cvr"
    return _ptas(inst, epsilon_hat, eta_hint, c, distortion_constant, False, tag)


def ptas_cvr_multi(inst: VrpInstance, epsilon_hat: float, eta_hint: int = 1, c: float = 8.0,
                   distortion_constant: float = 32.0) -> tuple[TourSet, PipelineReport]:
    """Several depots; a tour may leave from one depot and end at another."""
    return _ptas(inst, epsilon_hat, eta_hint, c, distortion_constant, True, "cvr-multi")


# -- k-center / k-median ---------------------------------------------------

def kcenter_radius(g: MetricGraph, centers: Iterable[int]) -> float:
    cs = list(centers)
    return float(g.dist[cs, :].min(axis=0).max())


def kmedian_cost(g: MetricGraph, centers: Iterable[int], weights: dict | None = None) -> float:
    cs = list(centers)
    near = g.dist[cs, :].min(axis=0)
    if weights is None:
        return float(near.sum())
    return float(sum(w * near[v] for v, w in weights.items()))


def gonzalez_2approx(g: MetricGraph, k: int) -> list[int]:
    """Farthest-point traversal from vertex 0 (ties to the smaller id)."""
    if k < 1:
        raise GraphError("k must be at least 1")
    centers = [0]
    near = g.dist[0].copy()
    while len(centers) < min(k, g.n):
        far = int(np.argmax(near))
        if near[far] == 0:
            break
        centers.append(far)
        near = np.minimum(near, g.dist[far])
    return centers


def local_search_kmedian(g: MetricGraph, k: int, start: list[int],
                         weights: dict | None = None) -> list[int]:
    """Single-swap local search until no swap improves the cost."""
    cur = sorted(start)[:k]
    cost = kmedian_cost(g, cur, weights)
    improved = True
    while improved:
        improved = False
        for out, into in itertools.product(list(cur), range(g.n)):
            if into in cur:
                continue
            trial = sorted([x for x in cur if x != out] + [into])
            c2 = kmedian_cost(g, trial, weights)
            if c2 < cost - 1e-12 * max(1.0, cost):
                cur, cost, improved = trial, c2, True
                break
    return cur


def _center_host(g: MetricGraph, seed: list[int], epsilon_hat: float, eta_hint: int, c: float,
                 distortion_constant: float, clock: _Clock):
    gs, params = canonical_scale(g, c, epsilon_hat, distortion_constant)
    emb = embed_multi_depot(gs, seed, epsilon_hat, eta_hint, c, distortion_constant)
    clock.lap("embed")
    pend = emb.augmentation.pendants if emb.augmentation else []
    return emb, params.scale_factor, pend


def fpa_kcenter(g: MetricGraph, k: int, epsilon_hat: float, eta_hint: int = 1, c: float = 8.0,
                distortion_constant: float = 32.0) -> tuple[list[int], PipelineReport]:
    """Gonzalez seed, multi-depot embedding at the seed, exact k-center on the host."""
    clock = _Clock()
    seed = gonzalez_2approx(g, k)
    seed_r = kcenter_radius(g, seed)
    clock.lap("seed")
    if k >= g.n or seed_r == 0:
        rep = PipelineReport("kcenter", seed_r, seed_r, None, epsilon_hat, 0, clock.times,
                             {"k": k, "c": c, "eta_hint": eta_hint}, seed_cost=seed_r)
        return sorted(seed), rep
    emb, scale, pend = _center_host(g, seed, epsilon_hat, eta_hint, c, distortion_constant,
                                    clock)
    sol = solve_kcenter_td(emb.host, emb.decomposition, k, coverable=range(g.n),
                           candidates=range(g.n), far_only=pend)
    clock.lap("solve")
    radius = kcenter_radius(g, sol.centers)
    rep = PipelineReport("kcenter", radius, sol.value / scale, None, epsilon_hat, emb.width,
                         clock.times, {"k": k, "c": c, "eta_hint": eta_hint,
                                       "distortion_constant": distortion_constant,
                                       "scale_factor": scale, "seed": seed,
                                       "host_vertices": emb.host.n, "dp_states": sol.states},
                         seed_cost=seed_r)
    return sol.centers, rep


def fpa_kmedian(g: MetricGraph, k: int, epsilon_hat: float, eta_hint: int = 1, c: float = 8.0,
                distortion_constant: float = 32.0,
                weights: dict | None = None) -> tuple[list[int], PipelineReport]:
    """Local-search seed, multi-depot embedding at the seed, exact k-median on the host."""
    clock = _Clock()
    seed = local_search_kmedian(g, k, gonzalez_2approx(g, k), weights)
    seed_c = kmedian_cost(g, seed, weights)
    clock.lap("seed")
    if k >= g.n or seed_c == 0:
        rep = PipelineReport("kmedian", seed_c, seed_c, None, epsilon_hat, 0, clock.times,
                             {"k": k, "c": c, "eta_hint": eta_hint}, seed_cost=seed_c)
        return sorted(seed), rep
    emb, scale, pend = _center_host(g, seed, epsilon_hat, eta_hint, c, distortion_constant,
                                    clock)
    wts = {v: 1.0 for v in range(g.n)} if weights is None else dict(weights)
    sol = solve_kmedian_td(emb.host, emb.decomposition, k, weights=wts,
                           candidates=range(g.n), far_only=pend, upper=seed)
    clock.lap("solve")
    cost = kmedian_cost(g, sol.centers, weights)
    rep = PipelineReport("kmedian", cost, sol.value / scale, None, epsilon_hat, emb.width,
                         clock.times, {"k": k, "c": c, "eta_hint": eta_hint,
                                       "distortion_constant": distortion_constant,
                                       "scale_factor": scale, "seed": seed,
                                       "host_vertices": emb.host.n, "dp_states": sol.states},
                         seed_cost=seed_c)
    return sol.centers, rep
