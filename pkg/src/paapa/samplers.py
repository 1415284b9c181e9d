"""Attachment rules: exact probabilities and exact samplers.

Preferential draws pick a uniform slot of the endpoint array. Both
anti-preferential rules use rejection against the envelope constant
``C`` (``2mt + 1`` or ``M_t + 1``): propose a uniform vertex and accept it
with probability ``(C - d) / C``. Acceptance weights are proportional to
the target weights, so the accepted vertex follows the rule exactly.
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .graph import GraphState, Variant


class AttachmentRule(str, enum.Enum):
    PREFERENTIAL = "preferential"
    ANTI_PREFERENTIAL = "anti-preferential"
    ANTI_PREFERENTIAL_MAX_DEG = "anti-preferential-max-degree"


def _check_rule(state: GraphState, rule: AttachmentRule) -> AttachmentRule:
    rule = AttachmentRule(rule)
    if (rule is AttachmentRule.ANTI_PREFERENTIAL_MAX_DEG
            and state.params.variant is not Variant.PA_APA_2):
        raise ValueError("the max-degree anti-preferential rule requires variant PA-APA-2")
    return rule


def envelope(state: GraphState, rule: AttachmentRule) -> int:
    """Largest anti-preferential weight plus one: ``2mt + 1`` or ``M_t + 1``."""
    rule = _check_rule(state, rule)
    if rule is AttachmentRule.ANTI_PREFERENTIAL_MAX_DEG:
        return state.max_degree + 1
    return 2 * state.m * state.t + 1


def attach_weights(state: GraphState, rule: AttachmentRule) -> tuple[np.ndarray, int]:
    """Integer weights of vertices ``1..t`` and their exact total.

    The total is the closed-form denominator of the rule (``2mt``,
    ``t(2mt + 1 - 2m)`` or ``t(M_t + 1 - 2m)``), not a sum of the weights.
    """
    rule = _check_rule(state, rule)
    m, t = state.m, state.t
    deg = state.degrees.astype(np.int64)
    if rule is AttachmentRule.PREFERENTIAL:
        return deg, 2 * m * t
    c = envelope(state, rule)
    return c - deg, t * (c - 2 * m)


def attach_probability(state: GraphState, i: int, rule: AttachmentRule) -> float:
    if not 1 <= i <= state.t:
        raise IndexError(f"vertex {i} out of range 1..{state.t}")
    rule = _check_rule(state, rule)
    m, t, d = state.m, state.t, state.degree(i)
    if rule is AttachmentRule.PREFERENTIAL:
        num, den = d, 2 * m * t
    else:
        c = envelope(state, rule)
        num, den = c - d, t * (c - 2 * m)
    return num / den


def attach_probabilities(state: GraphState, rule: AttachmentRule) -> np.ndarray:
    weights, total = attach_weights(state, rule)
    return weights / total


def sample_preferential(state: GraphState, rng: np.random.Generator,
                        size: int | None = None):
    if size is None:
        return int(_kernels.draw_preferential(state._endpoints, state.t, state.m, rng))
    return _kernels.draw_many_preferential(state._endpoints, state.t, state.m, size, rng)


def sample_antipreferential(state: GraphState, rng: np.random.Generator,
                            rule: AttachmentRule = AttachmentRule.ANTI_PREFERENTIAL,
                            size: int | None = None):
    rule = _check_rule(state, rule)
    if rule is AttachmentRule.PREFERENTIAL:
        raise ValueError("sample_antipreferential needs an anti-preferential rule")
    c = envelope(state, rule)
    if size is None:
        return int(_kernels.draw_antipreferential(state._degrees, state.t, c, rng))
    return _kernels.draw_many_antipreferential(state._degrees, state.t, c, size, rng)


def sample(state: GraphState, rng: np.random.Generator, rule: AttachmentRule,
           size: int | None = None):
    if AttachmentRule(rule) is AttachmentRule.PREFERENTIAL:
        return sample_preferential(state, rng, size)
    return sample_antipreferential(state, rng, rule, size)


def weight_sum_identities(state: GraphState) -> dict[str, bool]:
    """Exact integer check that each rule's weights sum to its denominator."""
    m, t = state.m, state.t
    deg = state.degrees.astype(np.int64)
    total = int(deg.sum())
    checks = {
        "preferential": total == 2 * m * t,
        "anti-preferential": int((2 * m * t + 1 - deg).sum()) == t * (2 * m * t + 1 - 2 * m),
    }
    big = state.max_degree
    checks["anti-preferential-max-degree"] = (
        big == int(deg.max()) and int((big + 1 - deg).sum()) == t * (big + 1 - 2 * m))
    return checks
