"""Correlated binary Markov source pairs and their entropies.

The first source is a two-state Markov chain whose emitted bit is the
current state.  The second source is the first one seen through a binary
symmetric channel with crossover probability ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


class DegenerateChainError(ValueError):
    """Raised when alpha + beta == 0 and the stationary law is undefined."""


def _check_prob(name, value):
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class MarkovParams:
    """Transition probabilities of the binary Markov chain.

    ``alpha`` is P(S_t=1 | S_{t-1}=0) and ``beta`` is P(S_t=0 | S_{t-1}=1).
    """

    alpha: float
    beta: float

    def __post_init__(self):
        _check_prob("alpha", self.alpha)
        _check_prob("beta", self.beta)

    @property
    def transition_matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[1.0 - a, a], [b, 1.0 - b]])


@dataclass(frozen=True)
class CorrelationParams:
    """Bit-flip probability between the two sources (0 <= p <= 0.5)."""

    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 0.5) or math.isnan(self.p):
            raise ValueError(f"p must lie in [0, 0.5], got {self.p!r}")


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, with 0*log2(0) taken as 0."""
    _check_prob("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def stationary_distribution(params: MarkovParams) -> tuple[float, float]:
    s = params.alpha + params.beta
    if s == 0.0:
        raise DegenerateChainError("alpha + beta = 0: stationary distribution undefined")
    return params.beta / s, params.alpha / s


def entropy_rate(params: MarkovParams) -> float:
    """Entropy rate in bits per symbol of the stationary chain."""
    mu0, mu1 = stationary_distribution(params)
    return mu0 * binary_entropy(params.alpha) + mu1 * binary_entropy(params.beta)


def joint_entropy(params: MarkovParams, corr: CorrelationParams) -> float:
    """H(s1, s2) = H(s1) + h(p), in bits per symbol pair."""
    return entropy_rate(params) + binary_entropy(corr.p)


def generate_markov(params: MarkovParams, length: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``length`` bits from the chain, starting in its stationary law.

    With alpha + beta == 0 the chain is absorbing and the initial state is
    drawn uniformly.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    s = params.alpha + params.beta
    mu1 = 0.5 if s == 0.0 else params.alpha / s
    u = rng.random(length)
    bits = np.empty(length, dtype=np.uint8)
    state = 1 if u[0] < mu1 else 0
    bits[0] = state
    # switch probability depends on the current state only
    switch = (params.alpha, params.beta)
    for t in range(1, length):
        if u[t] < switch[state]:
            state ^= 1
        bits[t] = state
    return bits


def apply_correlation(src, corr, rng: np.random.Generator) -> np.ndarray:
    """Return ``src XOR z`` with z i.i.d. Bernoulli(p).

    ``corr`` is a :class:`CorrelationParams` or a bare flip probability in
    [0, 1]; the bare form exists for channel-style tests beyond p = 0.5.
    """
    p = corr.p if isinstance(corr, CorrelationParams) else float(corr)
    _check_prob("p", p)
    src = np.asarray(src, dtype=np.uint8)
    z = (rng.random(src.shape) < p).astype(np.uint8)
    return src ^ z
