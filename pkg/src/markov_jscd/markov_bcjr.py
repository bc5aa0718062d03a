"""Log-domain forward-backward decoder on the two-state Markov source trellis.

The trellis state is the source bit itself, so every branch s' -> s emits
bit s.  With two states the forward and backward metrics reduce to one
log-ratio each, and each log-sum-exp pair collapses to a single log of a
ratio of exponential sums.  A-priori LLRs come from the sum-product decoder; the output is the
extrinsic LLR (posterior minus a-priori), computed without ever touching
the a-priori value of the position it is reported for.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np
from numba import njit

from .source_model import MarkovParams, stationary_distribution

LLR_CLAMP = 30.0


def _log(x):
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True, eq=False)
class MarkovTrellis:
    params: MarkovParams
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("trellis length must be >= 1")
        stationary_distribution(self.params)  # rejects alpha + beta == 0

    @cached_property
    def log_transitions(self) -> np.ndarray:
        P = self.params.transition_matrix
        return np.array([[_log(P[i, j]) for j in range(2)] for i in range(2)])

    @cached_property
    def transitions(self) -> np.ndarray:
        return self.params.transition_matrix

    @cached_property
    def log_initial(self) -> np.ndarray:
        mu0, mu1 = stationary_distribution(self.params)
        return np.array([_log(mu0), _log(mu1)])


@njit(cache=True, inline="always")
def _log_ratio(x, a, b, c, d):
    # ln((a e^x + b) / (c e^x + d)) = lse(x + ln a, ln b) - lse(x + ln c, ln d)
    if x >= 0.0:
        u = math.exp(-x)
        num = a + b * u
        den = c + d * u
    else:
        u = math.exp(x)
        num = a * u + b
        den = c * u + d
    if den == 0.0:
        return np.inf
    if num == 0.0:
        return -np.inf
    return math.log(num / den)


@njit(cache=True)
def _bcjr_kernel(P, d0, apriori, clamp, out):
    """Two-state forward-backward on state log-ratios.

    fwd[t] = ln P(S_t=0, priors before t) - ln P(S_t=1, priors before t)
    bwd[t] = ln P(priors after t | S_t=0) - ln P(priors after t | S_t=1)
    The extrinsic LLR of bit t is fwd[t] + bwd[t].
    """
    k = apriori.size
    fwd = np.empty(k)
    fwd[0] = d0
    for t in range(1, k):
        fwd[t] = _log_ratio(fwd[t - 1] + apriori[t - 1], P[0, 0], P[1, 0], P[0, 1], P[1, 1])
    bwd = 0.0
    for t in range(k - 1, -1, -1):
        e = fwd[t] + bwd
        if e != e:
            e = 0.0
        elif e > clamp:
            e = clamp
        elif e < -clamp:
            e = -clamp
        out[t] = e
        bwd = _log_ratio(apriori[t] + bwd, P[0, 0], P[0, 1], P[1, 0], P[1, 1])


def bcjr_extrinsic(trellis: MarkovTrellis, apriori, clamp: float = LLR_CLAMP, out=None) -> np.ndarray:
    """Extrinsic LLR of every source bit given a-priori LLRs on all bits.

    ``out[t] = posterior_llr[t] - apriori[t]``, clipped to +-clamp.
    """
    ap = np.ascontiguousarray(apriori, dtype=np.float64)
    if ap.shape != (trellis.length,):
        raise ValueError(f"apriori has shape {ap.shape}, trellis length is {trellis.length}")
    if not np.all(np.isfinite(ap)):
        raise ValueError("apriori LLRs must be finite")
    if out is None:
        out = np.empty(trellis.length)
    li = trellis.log_initial
    _bcjr_kernel(trellis.transitions, li[0] - li[1], ap, float(clamp), out)
    return out
