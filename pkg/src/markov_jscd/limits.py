"""Shannon / Slepian-Wolf reference limits for the symmetric-rate system."""

from __future__ import annotations

from dataclasses import dataclass
import math

from .source_model import CorrelationParams, MarkovParams, joint_entropy


@dataclass(frozen=True)
class RatePair:
    rc1: float
    rc2: float

    def __post_init__(self):
        for name, r in (("rc1", self.rc1), ("rc2", self.rc2)):
            if not (0.0 < r <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {r!r}")

    @property
    def symmetric(self) -> bool:
        return self.rc1 == self.rc2


def total_rate(h_joint: float, rates: RatePair) -> float:
    """Source bits delivered per channel use summed over both channels."""
    return h_joint / (1.0 / rates.rc1 + 1.0 / rates.rc2)


def shannon_sw_limit(h_joint: float, rate: float) -> float:
    """Minimum E_so/N0 in dB for joint entropy ``h_joint`` and code rate ``rate`` per channel."""
    if not (0.0 < rate <= 1.0):
        raise ValueError(f"rate must lie in (0, 1], got {rate!r}")
    if h_joint <= 0.0:
        return -math.inf
    return 10.0 * math.log10(math.expm1(h_joint * rate * math.log(2.0)) / (2.0 * rate))


def limit_for(markov: MarkovParams, corr: CorrelationParams, rate: float) -> float:
    return shannon_sw_limit(joint_entropy(markov, corr), rate)
