"""Replica farms and the experiment recipes used by the CLI.

Replica ``r`` always draws from ``derive_seed(params.seed, r)`` and results
are returned in replica order, so the worker count never changes an output.
The growth kernel releases the GIL, which lets a thread pool run replicas in
parallel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence, TypeVar

import numpy as np

from .graph import GraphState, ModelParams, Observer, Variant, grow
from .seeding import derive_seed
from .stats import DegreeHistogram, graph_assortativity, histogram, merge_histograms

R = TypeVar("R")


def run_replicas(params: ModelParams, task: Callable[[ModelParams, int], R],
                 workers: int = 1) -> list[R]:
    """Evaluate ``task(params, r)`` for every replica ``r``, in replica order."""
    indices = range(params.replicas)
    if workers <= 1:
        return [task(params, r) for r in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: task(params, r), indices))


def replica_seeds(params: ModelParams) -> list[int]:
    return [derive_seed(params.seed, r) for r in range(params.replicas)]


def final_degrees(params: ModelParams, vertex: int, workers: int = 1) -> np.ndarray:
    """``d(v_vertex, T)`` for each replica."""
    if not 1 <= vertex <= params.horizon:
        raise ValueError(f"vertex {vertex} is never born before T={params.horizon}")

    def task(prm, r):
        return grow(prm, replica=r).state.degree(vertex)

    return np.array(run_replicas(params, task, workers), dtype=np.int64)


@dataclass
class GrowSummary:
    """Replica-merged observations of a ``grow`` run."""

    params: ModelParams
    checkpoints: list[int]
    histograms: dict[int, DegreeHistogram]
    vertex: int
    vertex_degrees: np.ndarray   # shape (replicas, checkpoints with vertex alive)
    vertex_times: list[int]
    max_degrees: np.ndarray      # shape (replicas, checkpoints)
    states: list[GraphState] | None = None

    def trajectory(self) -> list[tuple[int, float, int]]:
        means = self.vertex_degrees.mean(axis=0) if self.vertex_degrees.size else []
        return [(t, float(v), self.params.replicas) for t, v in zip(self.vertex_times, means)]


def grow_replicas(params: ModelParams, checkpoints: Sequence[int] | None = None,
                  vertex: int = 2, workers: int = 1, keep_states: bool = False) -> GrowSummary:
    checkpoints = sorted(set(checkpoints or [params.horizon]))
    vertex_times = [t for t in checkpoints if t >= vertex]

    def task(prm, r):
        observers = [
            Observer("hist", checkpoints, histogram),
            Observer("maxdeg", checkpoints, lambda s: s.max_degree),
            Observer("vertex", vertex_times, lambda s: s.degree(vertex)),
        ]
        res = grow(prm, observers, replica=r)
        return res.records, (res.state if keep_states else None)

    outputs = run_replicas(params, task, workers)
    hists = {}
    for idx, t in enumerate(checkpoints):
        hists[t] = merge_histograms(rec["hist"][idx][1] for rec, _ in outputs)
        hists[t].params = params
    max_deg = np.array([[v for _, v in rec["maxdeg"]] for rec, _ in outputs], dtype=np.int64)
    vdeg = np.array([[v for _, v in rec["vertex"]] for rec, _ in outputs], dtype=np.int64)
    states = [s for _, s in outputs] if keep_states else None
    return GrowSummary(params, checkpoints, hists, vertex, vdeg.reshape(params.replicas, -1),
                       vertex_times, max_deg, states)


def assortativity_sweep(m: int, horizon: int, p_values: Sequence[float],
                        variants: Sequence[Variant] = (Variant.PA_APA_2, Variant.PA_APA),
                        seed: int = 0, replicas: int = 3,
                        workers: int = 1) -> dict[tuple[float, Variant], list[float]]:
    """Assortativity per replica for every ``(p, variant)`` cell."""
    out = {}
    for p in p_values:
        for variant in variants:
            params = ModelParams(m=m, p=p, variant=variant, horizon=horizon,
                                 seed=seed, replicas=replicas)
            out[(p, Variant(variant))] = run_replicas(
                params, lambda prm, r: graph_assortativity(grow(prm, replica=r).state), workers)
    return out


def with_replicas(params: ModelParams, replicas: int) -> ModelParams:
    return replace(params, replicas=replicas)
