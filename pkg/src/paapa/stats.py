"""Measurements on grown graphs and comparisons against reference laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as sps

from .graph import GraphState, ModelParams


class UndefinedAssortativity(ValueError):
    """Every counted edge joins vertices of one common degree."""


@dataclass
class DegreeHistogram:
    """Vertex counts by degree; ``counts[k]`` is the number of vertices of degree ``k``."""

    counts: np.ndarray
    params: ModelParams | None = None
    graphs: int = 1

    @property
    def total_vertices(self) -> int:
        return int(self.counts.sum())

    @property
    def degree_sum(self) -> int:
        return int(np.dot(np.arange(len(self.counts)), self.counts))

    def as_dict(self) -> dict[int, int]:
        ks = np.nonzero(self.counts)[0]
        return {int(k): int(self.counts[k]) for k in ks}

    def fractions(self) -> dict[int, float]:
        n = self.total_vertices
        return {k: c / n for k, c in self.as_dict().items()}

    def __add__(self, other: DegreeHistogram) -> DegreeHistogram:
        size = max(len(self.counts), len(other.counts))
        counts = np.zeros(size, dtype=np.int64)
        counts[:len(self.counts)] += self.counts
        counts[:len(other.counts)] += other.counts
        params = self.params if self.params == other.params else None
        return DegreeHistogram(counts, params, self.graphs + other.graphs)


def histogram(state: GraphState) -> DegreeHistogram:
    return DegreeHistogram(np.bincount(state.degrees).astype(np.int64), state.params)


def histogram_from_counts(counts: Mapping[int, int]) -> DegreeHistogram:
    size = max(counts) + 1 if counts else 1
    arr = np.zeros(size, dtype=np.int64)
    for k, c in counts.items():
        arr[k] = c
    return DegreeHistogram(arr)


def merge_histograms(hists: Iterable[DegreeHistogram]) -> DegreeHistogram:
    hists = list(hists)
    if not hists:
        raise ValueError("nothing to merge")
    out = hists[0]
    for h in hists[1:]:
        out = out + h
    return out


# -- assortativity --------------------------------------------------------

def assortativity(edges, degrees: Sequence[int]) -> float:
    """Degree assortativity of an edge list (Pearson over both edge orientations).

    ``edges`` is a ``(step, source, target)`` triple of arrays or an iterable
    of ``EdgeRecord``; ``degrees[i - 1]`` is the degree of vertex ``i``.
    Edges created at step 1 (the initial self-loops) are skipped; parallel
    edges count once per copy.
    """
    if isinstance(edges, tuple) and len(edges) == 3 and hasattr(edges[0], "__len__"):
        steps, sources, targets = (np.asarray(a) for a in edges)
    else:
        rows = np.array([tuple(e) for e in edges], dtype=np.int64).reshape(-1, 3)
        steps, sources, targets = rows[:, 0], rows[:, 1], rows[:, 2]
    keep = steps > 1
    deg = np.asarray(degrees, dtype=np.float64)
    j = deg[sources[keep] - 1]
    k = deg[targets[keep] - 1]
    if len(j) < 1:
        raise UndefinedAssortativity("no edges to measure")
    x = np.concatenate([j, k])
    y = np.concatenate([k, j])
    mu = x.mean()
    var = np.mean((x - mu) ** 2)
    if var == 0:
        raise UndefinedAssortativity("all edge endpoints share one degree")
    return float(np.mean((x - mu) * (y - mu)) / var)


def graph_assortativity(state: GraphState) -> float:
    return assortativity(state.edge_arrays(), state.degrees)


# -- fits -----------------------------------------------------------------

@dataclass
class FitReport:
    slope: float
    intercept: float
    x_range: tuple[float, float]
    points_used: int
    residual_rms: float
    flagged: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def exponent(self) -> float:
        """Density exponent implied by a CCDF slope."""
        return self.slope - 1.0

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "x_range": list(self.x_range), "points_used": self.points_used,
                "residual_rms": self.residual_rms, "flagged": self.flagged,
                **self.extra}


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def tail_fit(hist: DegreeHistogram, kmin: int, min_count: int = 10,
             max_rms: float = 0.05) -> FitReport:
    """Least squares of ``ln CCDF(k)`` on ``ln k`` for ``k >= kmin`` with ``counts[k] >= min_count``.

    The fit is flagged when the residual RMS exceeds ``max_rms``, which marks
    a visibly curved (non power-law) tail.
    """
    counts = hist.counts.astype(np.float64)
    n = counts.sum()
    if n == 0:
        raise ValueError("empty histogram")
    ccdf = np.cumsum(counts[::-1])[::-1] / n
    ks = np.arange(len(counts))
    sel = (ks >= max(kmin, 1)) & (counts >= min_count)
    if sel.sum() < 3:
        raise ValueError(f"only {int(sel.sum())} qualifying points; need at least 3")
    x = np.log(ks[sel])
    y = np.log(ccdf[sel])
    slope, intercept, rms = _ols(x, y)
    report = FitReport(slope, intercept, (int(ks[sel][0]), int(ks[sel][-1])),
                       int(sel.sum()), rms, rms > max_rms)
    report.extra["exponent"] = report.exponent
    return report


def growth_regression(trajectory: Sequence[tuple[float, float]], mode: str = "sqrt") -> FitReport:
    """Least squares of mean degree on ``sqrt(t)`` or ``ln t``."""
    if len(trajectory) < 10:
        raise ValueError(f"need at least 10 checkpoints, got {len(trajectory)}")
    ts = np.array([a for a, _ in trajectory], dtype=np.float64)
    ys = np.array([b for _, b in trajectory], dtype=np.float64)
    if mode == "sqrt":
        x = np.sqrt(ts)
    elif mode == "log":
        x = np.log(ts)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'sqrt' or 'log'")
    slope, intercept, rms = _ols(x, ys)
    return FitReport(slope, intercept, (float(ts.min()), float(ts.max())), len(ts), rms,
                     extra={"mode": mode, "relative_rms": rms / abs(ys.mean()) if ys.mean() else math.inf})


# -- distances --------------------------------------------------------------

def _as_distribution(obj) -> dict[int, float]:
    if isinstance(obj, DegreeHistogram):
        if obj.total_vertices == 0:
            raise ValueError("empty histogram")
        return obj.fractions()
    return {int(k): float(v) for k, v in dict(obj).items()}


def tv_distance(empirical, reference) -> float:
    """Total variation distance; either side may be a histogram or a ``{k: prob}`` map.

    Mass missing from a truncated side (``1 - sum``) is added as if it sat on
    disjoint support, so the result is an upper bound when truncation occurs.
    """
    a = _as_distribution(empirical)
    b = _as_distribution(reference)
    diff = sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))
    missing = sum(max(0.0, 1.0 - sum(d.values())) for d in (a, b))
    if missing < 1e-12:
        missing = 0.0
    return min(1.0, 0.5 * (diff + missing))


def chi_square(observed: Mapping[int, int] | np.ndarray, probs: Mapping[int, float] | np.ndarray,
               min_expected: float = 5.0) -> tuple[float, int, float]:
    """Pearson goodness of fit; adjacent low-expectation cells are pooled.

    Returns ``(statistic, degrees_of_freedom, p_value)``.
    """
    if isinstance(observed, Mapping) or isinstance(probs, Mapping):
        keys = sorted(set(dict(observed)) | set(dict(probs)))
        obs = np.array([dict(observed).get(k, 0) for k in keys], dtype=np.float64)
        pr = np.array([dict(probs).get(k, 0.0) for k in keys], dtype=np.float64)
    else:
        obs = np.asarray(observed, dtype=np.float64)
        pr = np.asarray(probs, dtype=np.float64)
    n = obs.sum()
    exp = pr / pr.sum() * n
    pooled_obs, pooled_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_o
            pooled_exp[-1] += acc_e
        else:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
    if len(pooled_exp) < 2:
        return 0.0, 0, 1.0
    stat, pval = sps.chisquare(pooled_obs, pooled_exp)
    return float(stat), len(pooled_exp) - 1, float(pval)


# -- peak detection -------------------------------------------------------

@dataclass
class Peak:
    k: int
    height: float
    valley_depth: float


def detect_peak(hist: DegreeHistogram, window: int = 5, min_degree: int | None = None,
                noise_factor: float = 3.0) -> Peak | None:
    """Largest interior mode above ``min_degree`` (default ``2m``) of the smoothed histogram.

    A candidate counts only if the valley separating it from the higher-degree
    side of the low-degree mode is deeper than ``noise_factor`` times the
    Poisson scale ``sqrt(smoothed height)``.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 3, got {window}")
    if min_degree is None:
        if hist.params is None:
            raise ValueError("min_degree is required when the histogram carries no params")
        min_degree = 2 * hist.params.m
    counts = hist.counts.astype(np.float64)
    nz = np.nonzero(counts)[0]
    if len(nz) == 0:
        return None
    lo, hi = int(nz[0]), int(nz[-1])
    seg = counts[lo:hi + 1]
    kernel = np.ones(window)
    # edge-normalized moving average so the boundaries are not attenuated
    smooth = np.convolve(seg, kernel, mode="same") / np.convolve(np.ones_like(seg), kernel, mode="same")
    best = None
    for j in range(1, len(smooth) - 1):
        k = lo + j
        if k <= min_degree:
            continue
        if not (smooth[j] > smooth[j - 1] and smooth[j] >= smooth[j + 1]):
            continue
        v = int(np.argmin(smooth[:j + 1]))
        left_max = float(smooth[:v + 1].max())
        depth = min(float(smooth[j]), left_max) - float(smooth[v])
        if depth <= noise_factor * math.sqrt(smooth[j]):
            continue
        if best is None or smooth[j] > best.height:
            best = Peak(k, float(smooth[j]), depth)
    return best
