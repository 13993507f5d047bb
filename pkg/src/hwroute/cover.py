"""Shortest-path covers at every scale of the ladder ``r_i = (c/4)**i``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .metric import REL_TOL, MetricGraph, ScaleParams, ball


@dataclass
class PathBucket:
    """Canonical paths of all pairs whose distance lies in ``(r, c r / 2]``."""

    r: float
    c: float
    us: np.ndarray
    vs: np.ndarray
    lengths: np.ndarray
    ptr: np.ndarray
    verts: np.ndarray

    def __len__(self):
        return len(self.us)

    def path(self, k: int) -> list[int]:
        return self.verts[self.ptr[k]:self.ptr[k + 1]].tolist()

    def entries(self):
        for k in range(len(self)):
            yield int(self.us[k]), int(self.vs[k]), self.path(k), float(self.lengths[k])


def band_mask(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Vectorised ``(lo, hi]`` test with the shared relative tolerance."""
    above = values > lo + REL_TOL * np.maximum(np.abs(values), abs(lo))
    below = values <= hi + REL_TOL * np.maximum(np.abs(values), abs(hi))
    return above & below


def enumerate_paths(g: MetricGraph, r: float, c: float) -> PathBucket:
    dist = g.dist
    iu, iv = np.triu_indices(g.n, k=1)
    vals = dist[iu, iv]
    mask = band_mask(vals, r, c * r / 2.0)
    us, vs = iu[mask].astype(np.int64), iv[mask].astype(np.int64)
    ptr, verts = kernels.collect_paths(g.pred, us, vs)
    return PathBucket(r, c, us, vs, vals[mask], ptr, verts)


def build_cover(g: MetricGraph, r: float, c: float) -> list[int]:
    """Greedy hitting set of the bucket at ``r``, pruned to inclusion-wise minimality."""
    bucket = enumerate_paths(g, r, c)
    if len(bucket) == 0:
        return []
    return [int(h) for h in kernels.greedy_hitting_set(g.n, bucket.ptr, bucket.verts)]


@dataclass
class CoverLadder:
    params: ScaleParams
    hubs: list[list[int]] = field(default_factory=list)

    @property
    def radii(self) -> list[float]:
        return [self.params.r(i) for i in range(len(self.hubs))]

    @property
    def top(self) -> int:
        return len(self.hubs) - 1

    def all_hubs(self) -> set[int]:
        out: set[int] = set()
        for h in self.hubs:
            out.update(h)
        return out

    def to_json(self) -> list[dict]:
        return [{"i": i, "r": self.params.r(i), "hubs": list(h)} for i, h in enumerate(self.hubs)]


def build_ladder(g: MetricGraph, params: ScaleParams) -> CoverLadder:
    hubs = [build_cover(g, params.r(i), params.c) for i in range(params.r_max_index + 1)]
    return CoverLadder(params, hubs)


def measure_sparsity(g: MetricGraph, ladder: CoverLadder) -> list[int]:
    """Per scale, the most hubs found in any ball of diameter ``c r``."""
    out = []
    for i, hubs in enumerate(ladder.hubs):
        if not hubs:
            out.append(0)
            continue
        radius = ladder.params.c * ladder.params.r(i) / 2.0
        hs = set(hubs)
        out.append(max(len(ball(g, v, radius) & hs) for v in range(g.n)))
    return out
