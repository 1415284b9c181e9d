"""Exact evaluators for the PA-APA model (variant PA-APA only).

Time conventions: ``h_prob(m, p, k, t)`` is the probability that one of the
``m`` edges added at the step ``t -> t + 1`` lands on a given vertex of
degree ``k``; in the usual notation this is ``H(k, t + 1)``.

One regime draw governs all ``m`` edges of a step, so a vertex's increment
over a step is the mixture ``p Bin(m, H_apa) + (1 - p) Bin(m, H_pa)`` of the
two single-rule binomials. Its mean is ``m H``, but for ``m >= 2`` and
``0 < p < 1`` it is not ``Bin(m, H)``. The increment depends on the past
only through the vertex's own degree, so the per-vertex degree law is a
time-inhomogeneous Markov chain and ``degree_law_dp`` evolves it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

from .graph import Variant

__all__ = [
    "DegreeLaw", "c_coef", "e_coef", "growth_factor", "h_prob", "k_prob",
    "h_parts", "increment_probs", "stay_prob",
    "limit_pk", "limit_pk_recursive", "limit_law", "tail_exponent",
    "expected_degree", "expected_degree_trajectory", "expected_degree_pa_closed",
    "q_degree_m", "degree_law_dp", "degree_law_trajectory",
    "degree_law_first_passage", "mixture_pkt", "apa_growth_normalizer",
    "apa_bracket", "apa_infinite_product", "expected_degree_envelope",
]


def _check_m_p(m: int, p: float) -> None:
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


# -- scalars -------------------------------------------------------------

def c_coef(m: int, l: int) -> float:
    return (2 * m * l + 1) / (l * (2 * m * l + 1 - 2 * m))


def e_coef(m: int, l: int) -> float:
    return m / (l * (2 * m * l + 1 - 2 * m))


def growth_factor(m: int, p: float, l: int) -> float:
    """Multiplier of ``E[d]`` over the step ``l -> l + 1``: ``1 + (1-p)/(2l) - p e_l``."""
    return 1.0 + (1.0 - p) / (2 * l) - p * e_coef(m, l)


def h_prob(m: int, p: float, k, t: int):
    """``H(k, t + 1)``: per-edge probability of hitting a degree-``k`` vertex at time ``t``."""
    den_anti = t * (2 * m * t + 1 - 2 * m)
    assert den_anti > 0
    return p * (2 * m * t + 1 - k) / den_anti + (1.0 - p) * k / (2 * m * t)


def k_prob(m: int, p: float, k, t: int):
    return 1.0 - h_prob(m, p, k, t)


def h_parts(m: int, k, t: int):
    """Per-edge hit probabilities ``(H_pa, H_apa)`` of a degree-``k`` vertex at time ``t``."""
    return k / (2 * m * t), (2 * m * t + 1 - k) / (t * (2 * m * t + 1 - 2 * m))


def increment_probs(m: int, p: float, k, t: int) -> np.ndarray:
    """``out[j]`` = P(a degree-``k`` vertex gains ``j`` edges over the step ``t -> t + 1``)."""
    h_pa, h_apa = (np.clip(np.asarray(h, dtype=float), 0.0, 1.0) for h in h_parts(m, k, t))
    out = np.empty((m + 1,) + h_pa.shape)
    for j in range(m + 1):
        c = math.comb(m, j)
        out[j] = (p * c * h_apa ** j * (1 - h_apa) ** (m - j)
                  + (1 - p) * c * h_pa ** j * (1 - h_pa) ** (m - j))
    return out


def stay_prob(m: int, p: float, k, t: int):
    """P(a degree-``k`` vertex receives no edge over the step ``t -> t + 1``)."""
    h_pa, h_apa = h_parts(m, k, t)
    return p * (1 - h_apa) ** m + (1 - p) * (1 - h_pa) ** m


# -- limiting degree law -------------------------------------------------

# Stirling coefficients B_2j / (2j (2j - 1))
_STIRLING = tuple(b / (2 * j * (2 * j - 1)) for j, b in enumerate(
    (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510), start=1))


def _lgamma_shift(x: float, c: float) -> float:
    """``ln Gamma(x + c) - ln Gamma(x)`` without cancelling two large logs."""
    if x < 10.0:
        return float(gammaln(x + c) - gammaln(x))
    y = x + c
    corr = sum(s * (y ** (1 - 2 * j) - x ** (1 - 2 * j)) for j, s in enumerate(_STIRLING, start=1))
    return (x - 0.5) * math.log1p(c / x) + c * math.log(y) - c + corr


def limit_pk(m: int, p: float, k: int) -> float:
    """Limiting fraction of vertices with degree ``k``.

    For ``p < 1`` the law is a Gamma ratio with tail ``k**((p-3)/(1-p))``;
    for ``p = 1`` it is geometric with ratio ``m / (m + 1)``.
    """
    _check_m_p(m, p)
    if k < m:
        raise ValueError(f"k must be at least m={m}, got {k}")
    if p == 1.0:
        return (1.0 / (m + 1)) * (m / (m + 1)) ** (k - m)
    a = 2 * m * p / (1 - p)
    b = 1 + 2 * (m * p + 1) / (1 - p)
    # xi(k) / xi(m) with xi(x) = Gamma(x + a) / Gamma(x + b)
    log_ratio = _lgamma_shift(m + a, b - a) - _lgamma_shift(k + a, b - a)
    return 2.0 / (2 + m + m * p) * math.exp(log_ratio)


def limit_pk_recursive(m: int, p: float, k: int) -> float:
    _check_m_p(m, p)
    if k < m:
        raise ValueError(f"k must be at least m={m}, got {k}")
    value = 2.0 / (2 + m + m * p)
    for j in range(m + 1, k + 1):
        value *= (2 * m * p + (1 - p) * (j - 1)) / (2 + 2 * m * p + (1 - p) * j)
    return value


def limit_law(m: int, p: float, kmax: int) -> dict[int, float]:
    """``{k: P(k)}`` for ``m <= k <= kmax`` via the ratio recursion."""
    _check_m_p(m, p)
    out = {}
    value = 2.0 / (2 + m + m * p)
    out[m] = value
    for j in range(m + 1, kmax + 1):
        value *= (2 * m * p + (1 - p) * (j - 1)) / (2 + 2 * m * p + (1 - p) * j)
        out[j] = value
    return out


def tail_exponent(p: float) -> float:
    """Power-law exponent of the limiting degree law; diverges as p -> 1."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"no power-law tail for p={p}; p must lie in [0, 1)")
    return (p - 3) / (1 - p)


# -- expected degree -----------------------------------------------------

def _check_times(i: int, t: int) -> None:
    if i < 1:
        raise ValueError(f"vertex index must be >= 1, got {i}")
    if t < i:
        raise ValueError(f"time t={t} precedes the birth of vertex {i}")


def expected_degree_trajectory(m: int, p: float, i: int, t: int) -> np.ndarray:
    """``E[d(v_i, s)]`` for ``s = i..t`` (entry ``s - i``)."""
    _check_m_p(m, p)
    _check_times(i, t)
    out = np.empty(t - i + 1)
    value = float((2 if i == 1 else 1) * m)
    out[0] = value
    for l in range(i, t):
        value = value * growth_factor(m, p, l) + m * p * c_coef(m, l)
        out[l - i + 1] = value
    return out


def expected_degree(m: int, p: float, i: int, t: int) -> float:
    """Exact ``E[d(v_i, t)]``.

    Accumulates ``E_{l+1} = E_l C(l) + m p c_l`` from ``E_i = (1 + [i = 1]) m``,
    which expands to the product-plus-sum closed form.
    """
    return float(expected_degree_trajectory(m, p, i, t)[-1])


def expected_degree_pa_closed(m: int, i: int, t: int) -> float:
    """Pure preferential case: ``(1+[i=1]) m Γ(i)Γ(t+1/2) / (Γ(i+1/2)Γ(t))``."""
    _check_times(i, t)
    lead = (2 if i == 1 else 1) * m
    return lead * math.exp(gammaln(i) + gammaln(t + 0.5) - gammaln(i + 0.5) - gammaln(t))


# -- Q(m, t) recurrence ---------------------------------------------------

def q_degree_m(m: int, p: float, t: int) -> float:
    """Average over ``v_2..v_t`` of ``P(d(v_j, t) = m)``."""
    _check_m_p(m, p)
    if t < 2:
        raise ValueError(f"Q(m, t) needs t >= 2, got {t}")
    q = 1.0
    for s in range(3, t + 1):
        q = (s - 2) / (s - 1) * stay_prob(m, p, m, s - 1) * q + 1.0 / (s - 1)
    return q


# -- exact per-vertex degree law ----------------------------------------

@dataclass
class DegreeLaw:
    """Exact law of ``d(v_vertex, time)``; ``probs[j]`` is ``P(d = kmin + j)``."""

    vertex: int
    time: int
    m: int
    p: float
    kmin: int
    probs: np.ndarray

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.probs) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.kmin, self.kmax + 1)

    def pmf(self, k: int) -> float:
        j = k - self.kmin
        return float(self.probs[j]) if 0 <= j < len(self.probs) else 0.0

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in zip(self.support, self.probs)}


def _increment_step(probs: np.ndarray, kmin: int, m: int, p: float, t: int) -> np.ndarray:
    # law at time t -> law at time t+1, same kmin, support grows by m
    inc = increment_probs(m, p, kmin + np.arange(len(probs)), t)
    out = np.zeros(len(probs) + m)
    for j in range(m + 1):
        out[j:j + len(probs)] += inc[j] * probs
    return out


def _require_pa_apa(variant) -> None:
    if Variant(variant) is not Variant.PA_APA:
        raise ValueError("exact degree laws exist only for variant PA-APA "
                         "(PA-APA-2 depends on the random maximum degree)")


def degree_law_trajectory(m: int, p: float, i: int, t: int, variant=Variant.PA_APA):
    """Yield ``DegreeLaw`` for vertex ``i`` at every time ``i..t``."""
    _require_pa_apa(variant)
    _check_m_p(m, p)
    _check_times(i, t)
    kmin = 2 * m if i == 1 else m
    probs = np.ones(1)
    yield DegreeLaw(i, i, m, p, kmin, probs)
    for s in range(i, t):
        probs = _increment_step(probs, kmin, m, p, s)
        yield DegreeLaw(i, s + 1, m, p, kmin, probs)


def degree_law_dp(m: int, p: float, i: int, t: int, variant=Variant.PA_APA) -> DegreeLaw:
    law = None
    for law in degree_law_trajectory(m, p, i, t, variant):
        pass
    return law


def degree_law_first_passage(m: int, p: float, i: int, t: int) -> DegreeLaw:
    """Degree law rebuilt from first-passage probabilities.

    ``f(k, s)`` (first reaching ``k`` at time ``s``) comes from the law at
    ``s - 1``; the law at ``s`` is then ``sum_r f(k, r)`` times the probability
    of receiving no edge over the steps ``r -> s``.
    Quadratic in ``t``; intended as a cross-check on small instances.
    """
    _check_m_p(m, p)
    if i < 2:
        raise ValueError("first-passage decomposition is defined for i >= 2")
    _check_times(i, t)
    size = (t - i + 1) * m - m + 1
    ks = m + np.arange(size)
    first = np.zeros((t + 1, size))
    first[i, 0] = 1.0
    law = first[i].copy()
    for s in range(i + 1, t + 1):
        f = np.zeros(size)
        for kk in range(size):
            k = m + kk
            for j in range(1, min(k - m, m) + 1):
                f[kk] += increment_probs(m, p, k - j, s - 1)[j] * law[kk - j]
        first[s] = f
        law = np.zeros(size)
        for r in range(i, s + 1):
            stay = np.ones(size)
            for j in range(r, s):
                stay *= stay_prob(m, p, ks, j)
            law += first[r] * stay
    hi = (t - i + 1) * m
    return DegreeLaw(i, t, m, p, m, law[:hi - m + 1])


def mixture_pkt(m: int, p: float, t: int, kmax: int | None = None,
                variant=Variant.PA_APA) -> tuple[dict[int, float], float]:
    """Exact ``P(k, t)`` for ``k <= kmax`` and the probability mass above ``kmax``.

    The per-vertex laws share one transition kernel, so their sum evolves by
    the same binomial step plus a unit mass at ``m`` for each newborn vertex.
    """
    _require_pa_apa(variant)
    _check_m_p(m, p)
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    # index j is degree m + j; v_1 starts at 2m
    total = np.zeros(m + 1)
    total[m] = 1.0
    for s in range(1, t):
        total = _increment_step(total, m, m, p, s)
        total[0] += 1.0
    pkt = total / t
    ks = m + np.arange(len(pkt))
    if kmax is None:
        kmax = int(ks[-1])
    keep = ks <= kmax
    dropped = float(pkt[~keep].sum())
    return {int(k): float(v) for k, v in zip(ks[keep], pkt[keep])}, dropped


# -- pure anti-preferential growth --------------------------------------

def apa_growth_normalizer(m: int, i: int, t: int) -> float:
    """``sum_{l=i}^{t-1} ln(1 + c_l) prod_{h=l+1}^{t-1} (1 - e_h)``."""
    if i < 2:
        raise ValueError(f"needs i >= 2, got {i}")
    if t <= i:
        raise ValueError(f"needs t > i, got t={t}, i={i}")
    value = 0.0
    for l in range(i, t):
        value = value * (1.0 - e_coef(m, l)) + math.log1p(c_coef(m, l))
    return value


def apa_infinite_product(m: int, i: int, terms: int = 100_000) -> float:
    """``prod_{h>=i} (1 - e_h)``, with the tail beyond ``terms`` summed via digamma."""
    if i < 2:
        raise ValueError(f"needs i >= 2, got {i}")
    last = i + terms
    h = np.arange(i, last, dtype=float)
    log_head = np.log1p(-m / (h * (2 * m * h + 1 - 2 * m))).sum()
    # e_h = (1/(2a)) (1/(h-a) - 1/h) with a = (2m-1)/(2m)
    a = (2 * m - 1) / (2 * m)
    if a == 0:
        tail = 0.0
    else:
        tail = (digamma(last) - digamma(last - a)) / (2 * a)
    return float(math.exp(log_head - tail))


def apa_bracket(m: int, i: int, t: int) -> tuple[float, float, float]:
    """Bounds on the normalizer relative to ``S = sum_{l=i}^{t-1} ln(1 + c_l)``.

    Returns ``(lower, ratio, upper)`` where ``ratio = normalizer / S``,
    ``lower = prod_{h=i}^{t-1} (1 - e_h)`` and ``upper = 1``.
    """
    norm = apa_growth_normalizer(m, i, t)
    s = sum(math.log1p(c_coef(m, l)) for l in range(i, t))
    lower = math.prod(1.0 - e_coef(m, h) for h in range(i, t))
    return lower, norm / s, 1.0


def expected_degree_envelope(m: int, p: float, t: float) -> float:
    """``t**((1-p)/2) * (ln t)**p``, the growth envelope of the mixed model."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"envelope is defined for p in (0, 1), got {p}")
    if t < 2:
        raise ValueError(f"envelope needs t >= 2, got {t}")
    return t ** ((1 - p) / 2) * math.log(t) ** p
