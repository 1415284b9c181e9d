"""Multigraph state and growth dynamics of the PA-APA family.

Vertices are identified by their insertion time ``1..t``. Vertex 1 starts
with ``m`` self-loops; every later vertex brings ``m`` edges whose targets are
drawn independently from the state at the previous time, with one Bernoulli
regime choice per step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .seeding import MASK64, replica_rng


class Variant(str, enum.Enum):
    PA_APA = "PA-APA"
    PA_APA_2 = "PA-APA-2"

    @property
    def code(self) -> int:
        return _kernels.PA_APA if self is Variant.PA_APA else _kernels.PA_APA_2


@dataclass(frozen=True)
class ModelParams:
    """Full definition of one experiment.

    ``horizon`` is the final time T (number of vertices in the last graph).
    """

    m: int
    p: float
    variant: Variant = Variant.PA_APA
    horizon: int = 1
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be positive, got {self.replicas}")


class EdgeRecord(NamedTuple):
    step: int
    source: int
    target: int


@dataclass
class GraphState:
    """Evolving multigraph.

    Storage is preallocated up to a capacity and grown on demand. Edge ``e``
    occupies endpoint slots ``2e`` (source) and ``2e + 1`` (target), so the
    endpoint array doubles as the ordered edge list.
    """

    params: ModelParams
    t: int
    max_degree: int
    _degrees: np.ndarray = field(repr=False)
    _endpoints: np.ndarray = field(repr=False)
    _regime: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def capacity(self) -> int:
        return len(self._degrees) - 1

    @property
    def degrees(self) -> np.ndarray:
        """Read-only degrees of vertices ``1..t`` (position ``i - 1`` holds vertex ``i``)."""
        return _readonly(self._degrees[1:self.t + 1])

    @property
    def endpoints(self) -> np.ndarray:
        return _readonly(self._endpoints[:2 * self.m * self.t])

    @property
    def regime_log(self) -> np.ndarray:
        """Realized Bernoulli draws ``Y_2..Y_t``."""
        return _readonly(self._regime[2:self.t + 1])

    def degree(self, i: int) -> int:
        if not 1 <= i <= self.t:
            raise IndexError(f"vertex {i} does not exist at time {self.t}")
        return int(self._degrees[i])

    def ensure_capacity(self, t: int) -> None:
        if t <= self.capacity:
            return
        new_cap = max(t, 2 * self.capacity)
        m = self.m
        self._degrees = _resized(self._degrees, new_cap + 1)
        self._regime = _resized(self._regime, new_cap + 1)
        self._endpoints = _resized(self._endpoints, 2 * m * new_cap)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(step, source, target)`` arrays in creation order."""
        ends = self.endpoints
        sources = ends[0::2]
        targets = ends[1::2]
        # an edge is created at the time its source vertex arrives
        return sources.copy(), sources.copy(), targets.copy()

    def edges(self) -> Iterator[EdgeRecord]:
        steps, sources, targets = self.edge_arrays()
        for s, a, b in zip(steps.tolist(), sources.tolist(), targets.tolist()):
            yield EdgeRecord(s, a, b)

    def copy(self) -> GraphState:
        return GraphState(self.params, self.t, self.max_degree,
                          self._degrees.copy(), self._endpoints.copy(),
                          self._regime.copy())


def _readonly(view: np.ndarray) -> np.ndarray:
    view = view.view()
    view.flags.writeable = False
    return view


def _resized(arr: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=arr.dtype)
    out[:len(arr)] = arr
    return out


def init_graph(params: ModelParams, capacity: int | None = None) -> GraphState:
    """Single vertex carrying ``m`` self-loops, with room for ``capacity`` vertices."""
    m = params.m
    if m < 1:
        raise ValueError("m must be at least 1")
    cap = max(1, params.horizon if capacity is None else capacity)
    degrees = np.zeros(cap + 1, dtype=np.int64)
    degrees[1] = 2 * m
    endpoints = np.zeros(2 * m * cap, dtype=np.int64)
    endpoints[:2 * m] = 1
    regime = np.zeros(cap + 1, dtype=np.int8)
    return GraphState(params, 1, 2 * m, degrees, endpoints, regime)


def advance_to(state: GraphState, t_stop: int, rng: np.random.Generator) -> GraphState:
    """Run ``step`` until ``state.t == t_stop`` (in place)."""
    if t_stop < state.t:
        raise ValueError(f"cannot move back from t={state.t} to t={t_stop}")
    if t_stop == state.t:
        return state
    state.ensure_capacity(t_stop)
    params = state.params
    targets = np.empty(params.m, dtype=np.int64)
    state.max_degree = int(_kernels.advance(
        state._degrees, state._endpoints, state._regime, targets,
        state.t, t_stop, params.m, float(params.p), params.variant.code,
        state.max_degree, rng))
    state.t = t_stop
    return state


def step(state: GraphState, rng: np.random.Generator) -> GraphState:
    """Add one vertex and its ``m`` edges (in place); returns ``state``."""
    return advance_to(state, state.t + 1, rng)


@dataclass(frozen=True)
class Observer:
    """Callback invoked with the (read-only) state at each of ``times``."""

    name: str
    times: Sequence[int]
    fn: Callable[[GraphState], Any]


@dataclass
class GrowResult:
    state: GraphState
    records: dict[str, list[tuple[int, Any]]]


def grow(params: ModelParams, observers: Sequence[Observer] = (),
         rng: np.random.Generator | None = None, replica: int = 0) -> GrowResult:
    """Grow one graph from ``t = 1`` to ``params.horizon``.

    Without an explicit ``rng`` the generator is seeded from
    ``derive_seed(params.seed, replica)``.
    """
    if rng is None:
        rng = replica_rng(params.seed, replica)
    schedule: dict[int, list[Observer]] = {}
    for obs in observers:
        for when in sorted(set(obs.times)):
            if not 1 <= when <= params.horizon:
                raise ValueError(
                    f"observation time {when} outside [1, {params.horizon}] for {obs.name!r}")
            schedule.setdefault(int(when), []).append(obs)

    state = init_graph(params)
    records: dict[str, list[tuple[int, Any]]] = {obs.name: [] for obs in observers}
    for when in sorted(schedule):
        advance_to(state, when, rng)
        for obs in schedule[when]:
            records[obs.name].append((when, obs.fn(state)))
    advance_to(state, params.horizon, rng)
    return GrowResult(state, records)
