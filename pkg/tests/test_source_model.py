import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from markov_jscd.source_model import (
    CorrelationParams,
    DegenerateChainError,
    MarkovParams,
    apply_correlation,
    binary_entropy,
    entropy_rate,
    generate_markov,
    joint_entropy,
    stationary_distribution,
)

# 40-digit mpmath evaluations of -p log2 p - (1-p) log2(1-p)
H_01 = 0.46899559358928122125
H_RATE_01_02 = 0.55330642735530826346
H_JOINT_01_001 = 0.54978872948519239408

prob = st.floats(0.0, 1.0)
pos_prob = st.floats(1e-6, 1.0)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.1) == pytest.approx(H_01, abs=1e-14)


@pytest.mark.parametrize("bad", [-0.1, 1.1, float("nan")])
def test_binary_entropy_domain(bad):
    with pytest.raises(ValueError):
        binary_entropy(bad)


def test_stationary_distribution():
    assert stationary_distribution(MarkovParams(0.1, 0.1)) == pytest.approx((0.5, 0.5))
    assert stationary_distribution(MarkovParams(0.1, 0.2)) == pytest.approx((2 / 3, 1 / 3))
    assert stationary_distribution(MarkovParams(1.0, 1.0)) == (0.5, 0.5)
    with pytest.raises(DegenerateChainError):
        stationary_distribution(MarkovParams(0.0, 0.0))


def test_stationary_solves_balance_equation():
    params = MarkovParams(0.1, 0.2)
    mu = np.array(stationary_distribution(params))
    np.testing.assert_allclose(mu @ params.transition_matrix, mu, atol=1e-15)


def test_entropy_rate_values():
    assert entropy_rate(MarkovParams(0.5, 0.5)) == pytest.approx(1.0, abs=1e-15)
    assert entropy_rate(MarkovParams(0.1, 0.1)) == pytest.approx(H_01, abs=1e-14)
    assert entropy_rate(MarkovParams(0.1, 0.2)) == pytest.approx(H_RATE_01_02, abs=1e-14)


def test_joint_entropy_values():
    assert joint_entropy(MarkovParams(0.1, 0.1), CorrelationParams(0.0)) == pytest.approx(H_01, abs=1e-14)
    assert joint_entropy(MarkovParams(0.1, 0.1), CorrelationParams(0.01)) == pytest.approx(
        H_JOINT_01_001, abs=1e-14)
    assert joint_entropy(MarkovParams(0.5, 0.5), CorrelationParams(0.5)) == pytest.approx(2.0, abs=1e-15)


def test_params_validation():
    with pytest.raises(ValueError):
        MarkovParams(1.2, 0.1)
    with pytest.raises(ValueError):
        CorrelationParams(0.6)


@given(pos_prob, prob)
def test_stationary_sums_to_one(a, b):
    mu0, mu1 = stationary_distribution(MarkovParams(a, b))
    assert mu0 >= 0 and mu1 >= 0
    assert abs(mu0 + mu1 - 1.0) < 1e-12


@given(pos_prob, prob)
def test_entropy_rate_swap_symmetry(a, b):
    assert entropy_rate(MarkovParams(a, b)) == pytest.approx(entropy_rate(MarkovParams(b, a)), abs=1e-12)


@given(pos_prob)
def test_symmetric_entropy_rate_is_binary_entropy(a):
    assert entropy_rate(MarkovParams(a, a)) == pytest.approx(binary_entropy(a), abs=1e-12)


@given(pos_prob, prob, st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_joint_entropy_monotone_in_p(a, b, p, q):
    lo, hi = sorted((p, q))
    m = MarkovParams(a, b)
    assert joint_entropy(m, CorrelationParams(lo)) <= joint_entropy(m, CorrelationParams(hi)) + 1e-15


class _FixedStream:
    """Stands in for a Generator whose uniforms are scripted."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def random(self, size):
        return self.values[:size]


def test_absorbing_chain():
    # first uniform 0.9 > mu1 = 0.5 -> state 0
    out = generate_markov(MarkovParams(0.0, 0.0), 5, _FixedStream([0.9, 0.1, 0.1, 0.1, 0.1]))
    assert out.tolist() == [0, 0, 0, 0, 0]


def test_alternating_chain():
    out = generate_markov(MarkovParams(1.0, 1.0), 4, _FixedStream([0.1, 0.5, 0.5, 0.5]))
    assert out.tolist() == [1, 0, 1, 0]


def test_generate_rejects_empty(rng):
    with pytest.raises(ValueError):
        generate_markov(MarkovParams(0.1, 0.1), 0, rng)


def test_generate_reproducible():
    p = MarkovParams(0.1, 0.3)
    a = generate_markov(p, 5000, np.random.default_rng(7))
    b = generate_markov(p, 5000, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_transition_frequency_and_stationary_law():
    params = MarkovParams(0.1, 0.1)
    bits = generate_markov(params, 10**6, np.random.default_rng(3))
    prev, cur = bits[:-1], bits[1:]
    from_zero = prev == 0
    freq01 = np.mean(cur[from_zero] == 1)
    assert abs(freq01 - 0.1) < 0.002
    # chi-square against the stationary law; the chain's positive correlation
    # inflates the variance by (1 + rho)/(1 - rho) with rho = 1 - alpha - beta
    counts = np.bincount(bits, minlength=2)
    expected = np.array(stationary_distribution(params)) * bits.size
    chi2 = np.sum((counts - expected) ** 2 / expected)
    rho = 1 - params.alpha - params.beta
    inflation = (1 + rho) / (1 - rho)
    assert chi2 / inflation < stats.chi2.ppf(0.999, df=1)


def test_asymmetric_chain_stationary_frequency():
    params = MarkovParams(0.1, 0.2)
    bits = generate_markov(params, 10**6, np.random.default_rng(4))
    assert abs(bits.mean() - 1 / 3) < 0.005


def test_apply_correlation_edge_cases(rng):
    src = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    assert np.array_equal(apply_correlation(src, CorrelationParams(0.0), rng), src)
    assert apply_correlation(np.ones(4, dtype=np.uint8), 1.0, rng).tolist() == [0, 0, 0, 0]


def test_apply_correlation_rate():
    src = np.zeros(10**6, dtype=np.uint8)
    out = apply_correlation(src, CorrelationParams(0.05), np.random.default_rng(5))
    assert abs(out.mean() - 0.05) < 0.002
