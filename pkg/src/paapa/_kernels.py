"""Jitted inner loops for growth and sampling.

Every random draw in the package goes through these functions so that the
single-step API, the bulk growth loop and the stand-alone samplers consume
the generator in exactly the same order.
"""

import numpy as np
from numba import njit

PA_APA = 0
PA_APA_2 = 1


@njit(nogil=True, cache=True)
def draw_preferential(endpoints, t, m, rng):
    # each vertex appears degrees[i] times among the first 2mt endpoints
    return endpoints[rng.integers(0, 2 * m * t)]


@njit(nogil=True, cache=True)
def draw_antipreferential(degrees, t, envelope, rng):
    # propose uniformly, accept with probability (envelope - d) / envelope
    while True:
        i = rng.integers(1, t + 1)
        if rng.integers(0, envelope) < envelope - degrees[i]:
            return i


@njit(nogil=True, cache=True)
def advance(degrees, endpoints, regime, targets, t, t_stop, m, p, variant,
            max_degree, rng):
    """Grow the graph from time ``t`` to ``t_stop`` in place.

    Returns the maximum degree at ``t_stop``.
    """
    while t < t_stop:
        anti = rng.random() < p
        if anti:
            if variant == PA_APA_2:
                envelope = max_degree + 1
            else:
                envelope = 2 * m * t + 1
            for r in range(m):
                targets[r] = draw_antipreferential(degrees, t, envelope, rng)
        else:
            for r in range(m):
                targets[r] = draw_preferential(endpoints, t, m, rng)

        new = t + 1
        regime[new] = 1 if anti else 0
        base = 2 * m * t
        for r in range(m):
            target = targets[r]
            endpoints[base + 2 * r] = new
            endpoints[base + 2 * r + 1] = target
            degrees[target] += 1
            if degrees[target] > max_degree:
                max_degree = degrees[target]
        degrees[new] = m
        if m > max_degree:
            max_degree = m
        t = new
    return max_degree


@njit(nogil=True, cache=True)
def draw_many_preferential(endpoints, t, m, size, rng):
    out = np.empty(size, np.int64)
    for s in range(size):
        out[s] = draw_preferential(endpoints, t, m, rng)
    return out


@njit(nogil=True, cache=True)
def draw_many_antipreferential(degrees, t, envelope, size, rng):
    out = np.empty(size, np.int64)
    for s in range(size):
        out[s] = draw_antipreferential(degrees, t, envelope, rng)
    return out
