"""Bounded-treewidth embeddings of low highway-dimension graphs and the routing,
k-center and k-median schemes built on them."""
from .kernels import BACKEND as KERNEL_BACKEND
from .metric import (MetricGraph, ScaleParams, ball, canonical_scale, shortest_distance,
                     shortest_path)

__all__ = ["KERNEL_BACKEND", "MetricGraph", "ScaleParams", "ball", "canonical_scale",
           "shortest_distance", "shortest_path"]
__version__ = "0.1.0"
