"""BPSK over AWGN: modulation, noise calibration and channel LLRs.

Bit 0 maps to +1 and bit 1 to -1, so a positive LLR favours 0.  LLRs are
natural-log.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class ChannelObservation:
    received: np.ndarray
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")


def sigma_from_eso_n0(eso_n0_db: float, rate: float) -> float:
    """Noise standard deviation for a given E_so/N0 (dB) and code rate.

    With unit-energy BPSK symbols each source bit costs 1/rate symbols per
    channel, so E_so/N0 = 1 / (2 * rate * sigma^2).
    """
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate!r}")
    if eso_n0_db == math.inf:
        return 0.0
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (eso_n0_db / 10.0)))


def bpsk(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def transmit(codeword, sigma: float, rng: np.random.Generator) -> ChannelObservation:
    """BPSK-modulate and add N(0, sigma^2) noise per sample.

    ``sigma = 0`` gives a noiseless observation; its ``sigma2`` is floored
    at the smallest positive double so that LLRs stay defined (and huge).
    """
    x = bpsk(codeword)
    if sigma > 0:
        x = x + sigma * rng.standard_normal(x.shape)
    return ChannelObservation(x, max(sigma * sigma, np.finfo(float).tiny))


def channel_llr(obs: ChannelObservation) -> np.ndarray:
    return 2.0 * np.asarray(obs.received, dtype=np.float64) / obs.sigma2
