import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paapa import theory as th
from paapa.graph import Variant


def test_classical_limit():
    assert th.limit_pk(1, 0.0, 1) == pytest.approx(2 / 3, rel=1e-14)
    for m in (1, 2, 4):
        for k in (m, m + 1, 3 * m, 40):
            want = 2 * m * (m + 1) / (k * (k + 1) * (k + 2))
            assert th.limit_pk(m, 0.0, k) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_geometric_limit(m):
    assert th.limit_pk(m, 1.0, m) == pytest.approx(1 / (m + 1))
    assert th.limit_pk(1, 1.0, 2) == pytest.approx(1 / 4)
    assert th.limit_pk_recursive(1, 1.0, 3) == pytest.approx(1 / 8)


@pytest.mark.parametrize("m,p", [(1, 0.0), (3, 0.4), (2, 0.9)])
def test_mass_at_m(m, p):
    assert th.limit_pk_recursive(m, p, m) == pytest.approx(2 / (2 + m + m * p), rel=1e-14)
    assert th.limit_pk(m, p, m) == pytest.approx(2 / (2 + m + m * p), rel=1e-12)


def test_recursive_agrees_at_a_point():
    assert abs(th.limit_pk_recursive(2, 0.0, 5) - th.limit_pk(2, 0.0, 5)) < 1e-12


def test_limit_below_m_is_rejected():
    with pytest.raises(ValueError):
        th.limit_pk(3, 0.5, 2)


@pytest.mark.parametrize("m,p", [(1, 0.0), (2, 0.5), (3, 1.0)])
def test_limit_law_sums_to_one(m, p):
    law = th.limit_law(m, p, 20000)
    assert sum(law.values()) == pytest.approx(1.0, abs=2e-3 if p < 1 else 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(0.0, 0.95), st.integers(0, 60))
def test_ratio_recursion(m, p, j):
    k = m + 1 + j
    ratio = th.limit_pk(m, p, k) / th.limit_pk(m, p, k - 1)
    want = (2 * m * p + (1 - p) * (k - 1)) / (2 + 2 * m * p + (1 - p) * k)
    assert ratio == pytest.approx(want, rel=1e-10)


def test_tail_exponent():
    assert th.tail_exponent(0.0) == -3
    assert th.tail_exponent(0.5) == -5
    with pytest.raises(ValueError):
        th.tail_exponent(1.0)


def test_expected_degree_boundaries():
    assert th.expected_degree(3, 0.4, 5, 5) == 3
    assert th.expected_degree(3, 0.4, 1, 1) == 6


def test_expected_degree_small_cases():
    assert th.expected_degree(1, 0.0, 2, 3) == pytest.approx(1.25)
    assert th.expected_degree(1, 1.0, 2, 3) == pytest.approx(5 / 3)


def test_pa_closed_form():
    assert th.expected_degree_pa_closed(1, 2, 3) == pytest.approx(1.25)
    assert th.expected_degree_pa_closed(4, 3, 3) == pytest.approx(4)
    assert th.expected_degree_pa_closed(2, 1, 1) == pytest.approx(4)
    assert abs(th.expected_degree_pa_closed(2, 1, 100) - th.expected_degree(2, 0.0, 1, 100)) < 1e-10


def test_expected_degree_increases():
    traj = th.expected_degree_trajectory(2, 0.5, 3, 400)
    assert np.all(np.diff(traj) > 0)


def test_q_degree_m():
    assert th.q_degree_m(2, 0.3, 2) == 1.0
    assert th.q_degree_m(1, 1.0, 100_000) == pytest.approx(0.5, abs=1e-3)
    assert th.q_degree_m(2, 0.0, 100_000) == pytest.approx(0.5, abs=1e-3)


def test_degree_law_small_cases():
    assert th.degree_law_dp(2, 0.5, 2, 2).as_dict() == {2: 1.0}
    law = th.degree_law_dp(1, 0.0, 2, 3).as_dict()
    assert law == pytest.approx({1: 0.75, 2: 0.25})
    law = th.degree_law_dp(1, 1.0, 2, 3).as_dict()
    assert law == pytest.approx({1: 1 / 3, 2: 2 / 3})


@pytest.mark.parametrize("m,p,i,t", [(1, 0.0, 2, 30), (2, 0.5, 3, 25), (3, 1.0, 2, 15),
                                     (2, 0.2, 1, 20)])
def test_degree_law_mean_and_mass(m, p, i, t):
    law = th.degree_law_dp(m, p, i, t)
    assert law.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert law.mean() == pytest.approx(th.expected_degree(m, p, i, t), rel=1e-12)


@pytest.mark.parametrize("m,p,i,t", [(1, 0.0, 2, 12), (2, 0.5, 2, 10), (2, 1.0, 4, 12)])
def test_first_passage_reconstruction(m, p, i, t):
    dp = th.degree_law_dp(m, p, i, t)
    fp = th.degree_law_first_passage(m, p, i, t)
    assert fp.kmin == dp.kmin
    assert np.allclose(fp.probs, dp.probs, atol=1e-12)


def test_exact_law_rejects_max_degree_variant():
    with pytest.raises(ValueError):
        th.degree_law_dp(1, 0.5, 2, 5, variant=Variant.PA_APA_2)
    with pytest.raises(ValueError):
        th.mixture_pkt(1, 0.5, 5, variant=Variant.PA_APA_2)


def test_mixture_pkt():
    pkt, dropped = th.mixture_pkt(2, 0.3, 1)
    assert pkt == {2: 0.0, 3: 0.0, 4: 1.0} and dropped == 0.0
    pkt, _ = th.mixture_pkt(2, 0.3, 40)
    assert sum(pkt.values()) == pytest.approx(1.0)
    assert sum(k * v for k, v in pkt.items()) == pytest.approx(4.0)
    # equals the average of the per-vertex laws
    avg = {}
    for i in range(1, 41):
        for k, v in th.degree_law_dp(2, 0.3, i, 40).as_dict().items():
            avg[k] = avg.get(k, 0.0) + v / 40
    assert all(pkt.get(k, 0.0) == pytest.approx(v, abs=1e-12) for k, v in avg.items())
    assert pkt[2] == pytest.approx(th.q_degree_m(2, 0.3, 40) * 39 / 40, abs=1e-12)


def test_mixture_truncation():
    full, _ = th.mixture_pkt(1, 0.0, 50)
    cut, dropped = th.mixture_pkt(1, 0.0, 50, kmax=10)
    assert max(cut) == 10
    assert dropped == pytest.approx(sum(v for k, v in full.items() if k > 10))


def test_apa_normalizer():
    assert th.apa_growth_normalizer(2, 5, 6) == pytest.approx(math.log1p(th.c_coef(2, 5)))
    lower, ratio, upper = th.apa_bracket(1, 2, 10_000)
    assert lower <= ratio <= upper
    assert th.apa_infinite_product(1, 2) <= lower


def test_infinite_product_tail():
    # more explicit terms must not move the value
    a = th.apa_infinite_product(2, 2, terms=1000)
    b = th.apa_infinite_product(2, 2, terms=200_000)
    assert a == pytest.approx(b, rel=1e-9)


def test_envelope():
    t = math.e ** 2
    assert th.expected_degree_envelope(1, 0.5, t) == pytest.approx(t ** 0.25 * 2 ** 0.5)
    assert th.expected_degree_envelope(1, 1e-9, 1e4) == pytest.approx(100, rel=1e-6)


def enumerate_laws(m, p, horizon):
    """Exact joint degree law by enumerating every regime and target draw."""
    from fractions import Fraction
    from itertools import product
    p = Fraction(p)
    states = {(2 * m,): Fraction(1)}
    for t in range(1, horizon):
        nxt = {}
        for deg, w in states.items():
            for anti, py in ((True, p), (False, 1 - p)):
                if py == 0:
                    continue
                weights = [2 * m * t + 1 - d if anti else d for d in deg]
                total = sum(weights)
                for targets in product(range(t), repeat=m):
                    pr = py
                    new = list(deg) + [m]
                    for v in targets:
                        pr *= Fraction(weights[v], total)
                        new[v] += 1
                    key = tuple(new)
                    nxt[key] = nxt.get(key, 0) + w * pr
        states = nxt
    return states


@pytest.mark.parametrize("m,p", [(2, 0.5), (2, 0.25), (3, 0.5), (1, 0.5)])
def test_dp_matches_enumeration(m, p):
    horizon = 5 if m < 3 else 4
    states = enumerate_laws(m, p, horizon)
    for i in range(1, horizon + 1):
        exact = {}
        for deg, w in states.items():
            exact[deg[i - 1]] = exact.get(deg[i - 1], 0) + w
        law = th.degree_law_dp(m, p, i, horizon)
        for k, w in exact.items():
            assert law.pmf(k) == pytest.approx(float(w), abs=1e-14)
    pkt, _ = th.mixture_pkt(m, p, horizon)
    mass_m = sum(w * sum(d == m for d in deg[1:]) for deg, w in states.items())
    assert th.q_degree_m(m, p, horizon) == pytest.approx(float(mass_m) / (horizon - 1), abs=1e-14)
    assert pkt[m] == pytest.approx(float(mass_m) / horizon, abs=1e-14)


def test_shared_regime_is_not_binomial():
    # v_2 at t=2 with m=2: P(+2) mixes 1/16 and 49/100, not (0.475)^2
    inc = th.increment_probs(2, 0.5, 2, 2)
    assert inc[2] == pytest.approx(0.5 / 16 + 0.5 * 0.49)
    assert inc.sum() == pytest.approx(1.0)
    assert np.dot(np.arange(3), inc) == pytest.approx(2 * th.h_prob(2, 0.5, 2, 2))
