"""Joint source-channel decoder for two LDPC-coded correlated Markov sources.

Each channel runs a sum-product decoder serially concatenated with the
Markov-trellis BCJR decoder (local iterations).  Between rounds of local
iterations the two channels exchange correlation-derived LLRs (global
iterations).  The four decoder modes share this one code path:

==========  ====================  =========================
mode        Markov extrinsic L_M  cross-channel update L_up
==========  ====================  =========================
sp          off                   off
sp-bcjr     on                    off
sp-cross    off                   on
jscd        on                    on
==========  ====================  =========================

Per-edge messages follow the check-major edge numbering of
:class:`~markov_jscd.ldpc_code.TannerGraph`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from numba import njit

from .channel import ChannelObservation, channel_llr
from .ldpc_code import SystematicCode
from .markov_bcjr import LLR_CLAMP, MarkovTrellis, bcjr_extrinsic

MODES = ("sp", "sp-bcjr", "sp-cross", "jscd")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder schedule and numerics.

    ``error_llr_form`` selects how the Hamming weight W of the estimated
    error vector becomes a reliability: ``"odds"`` uses the raw ratio
    (k - W) / W, ``"log"`` (default) uses ln((k - W) / W).  With
    ``signed_error_llr`` each position carries the sign of its estimated
    error bit; the default applies the same magnitude everywhere, i.e. the
    estimated crossover prior.  A signed estimate always agrees with the
    receiving channel's own decision, so it can only reinforce it.
    ``llr_change_threshold`` (off by default) also ends the local
    iterations once no posterior LLR moves by more than that amount.
    """

    mode: str = "jscd"
    max_local: int = 50
    max_global: int = 15
    clamp: float = LLR_CLAMP
    error_llr_form: str = "log"
    llr_change_threshold: float | None = None
    cross_input: str = "posterior"
    signed_error_llr: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.max_local < 1 or self.max_global < 1:
            raise ConfigurationError("iteration caps must be positive")
        if self.error_llr_form not in ("odds", "log"):
            raise ConfigurationError("error_llr_form must be 'odds' or 'log'")
        if self.cross_input not in ("posterior", "extrinsic"):
            raise ConfigurationError("cross_input must be 'posterior' or 'extrinsic'")
        if not self.clamp > 0:
            raise ConfigurationError("clamp must be positive")

    @property
    def use_markov(self) -> bool:
        return self.mode in ("sp-bcjr", "jscd")

    @property
    def use_cross(self) -> bool:
        return self.mode in ("sp-cross", "jscd")


# ---------------------------------------------------------------------------
# message-passing kernels


def _phi(x):
    """ln((e^x + 1) / (e^x - 1)) elementwise for x >= 0; self-inverse, phi(0) = inf."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


@njit(cache=True)
def _exclusive_sums(chk_ptr, mag, neg, out_sum, out_neg):
    # per check: sum of the other edges' magnitudes and parity of the other signs,
    # via prefix/suffix sums so that no subtraction (and no cancellation) occurs
    for c in range(chk_ptr.size - 1):
        lo = chk_ptr[c]
        hi = chk_ptr[c + 1]
        par = False
        acc = 0.0
        for e in range(lo, hi):
            out_sum[e] = acc
            acc += mag[e]
            par ^= neg[e]
        acc = 0.0
        for e in range(hi - 1, lo - 1, -1):
            out_sum[e] += acc
            acc += mag[e]
            out_neg[e] = par ^ neg[e]


def sp_round(graph, prior, L_cv, L_vc, clamp: float = LLR_CLAMP) -> None:
    """One flooding round: all variable-to-check, then all check-to-variable messages.

    ``prior`` holds the per-variable input LLR (channel plus any Markov or
    cross-channel term); ``L_cv`` is read as the previous round's check
    messages and overwritten with the new ones.
    """
    totals = prior + np.bincount(graph.edge_var, weights=L_cv, minlength=graph.n)
    np.clip(totals[graph.edge_var] - L_cv, -clamp, clamp, out=L_vc)
    neg = L_vc < 0
    excl = np.empty_like(L_vc)
    excl_neg = np.empty_like(neg)
    _exclusive_sums(graph.chk_ptr, _phi(np.abs(L_vc)), neg, excl, excl_neg)
    mag = np.minimum(_phi(excl), clamp)
    np.copyto(L_cv, np.where(excl_neg, -mag, mag))


def check_sums(graph, L_cv) -> np.ndarray:
    return np.bincount(graph.edge_var, weights=L_cv, minlength=graph.n)


def unsatisfied_checks(graph, hard) -> int:
    ones = np.bincount(graph.edge_check, weights=hard[graph.edge_var], minlength=graph.m)
    return int(np.count_nonzero(ones.astype(np.int64) & 1))


def boxplus(a, b, clamp: float = LLR_CLAMP) -> np.ndarray:
    """2 atanh(tanh(a/2) tanh(b/2)), evaluated without tanh saturation."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mag = np.minimum(_phi(_phi(np.abs(a)) + _phi(np.abs(b))), clamp)
    sign = np.where((a < 0) ^ (b < 0), -1.0, 1.0)
    return sign * mag


# ---------------------------------------------------------------------------
# single-message update rules


def vc_update_systematic(L_cc: float, L_cv_in, target: int, L_M: float, L_up: float) -> float:
    """Variable-to-check message of a systematic node towards neighbour ``target``.

    ``L_cv_in`` lists the incoming check messages of the node; the one from
    ``target`` (an index into that list) is left out.
    """
    s = L_cc
    for i, x in enumerate(L_cv_in):
        if i != target:
            s += x
    return s + L_M + L_up


def vc_update_parity(L_cc: float, L_cv_in, target: int) -> float:
    return vc_update_systematic(L_cc, L_cv_in, target, 0.0, 0.0)


def cv_update(L_vc_in, target: int, clamp: float = LLR_CLAMP) -> float:
    """Check-to-variable message (tanh rule) towards neighbour ``target``."""
    prod = 1.0
    for i, x in enumerate(L_vc_in):
        if i != target:
            prod *= math.tanh(x / 2.0)
    if prod >= 1.0:
        return clamp
    if prod <= -1.0:
        return -clamp
    return float(np.clip(2.0 * math.atanh(prod), -clamp, clamp))


def hard_decision(llr) -> np.ndarray:
    """Bit 0 where LLR >= 0, bit 1 where LLR < 0."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def estimate_error_vector(b1, b2) -> np.ndarray:
    b1 = np.asarray(b1, dtype=np.uint8)
    b2 = np.asarray(b2, dtype=np.uint8)
    if b1.shape != b2.shape:
        raise ValueError(f"length mismatch: {b1.shape} vs {b2.shape}")
    return b1 ^ b2


def error_llr(zhat, form: str = "odds", signed: bool = True) -> np.ndarray:
    """Reliability of the estimated inter-source error bits from their Hamming weight.

    W is saturated to [1, k - 1] so that an all-agree estimate stays finite.
    """
    z = np.asarray(zhat, dtype=np.uint8)
    k = z.size
    if k < 1:
        raise ValueError("empty error vector")
    w = min(max(int(z.sum()), 1), max(k - 1, 1))
    ratio = (k - w) / w
    if form == "odds":
        mag = ratio
    elif form == "log":
        mag = math.log(ratio) if ratio > 0 else 0.0
    else:
        raise ValueError(f"unknown form {form!r}")
    if not signed:
        return np.full(k, mag)
    return (1.0 - 2.0 * z) * mag


def cross_update(z_llr, other_posterior, clamp: float = LLR_CLAMP) -> np.ndarray:
    z = np.asarray(z_llr, dtype=np.float64)
    o = np.asarray(other_posterior, dtype=np.float64)
    if z.shape != o.shape:
        raise ValueError(f"length mismatch: {z.shape} vs {o.shape}")
    return boxplus(z, o, clamp)


# ---------------------------------------------------------------------------
# decoder state


class ChannelState:
    """All message arrays of one channel's concatenated SP-BCJR decoder."""

    def __init__(self, code: SystematicCode, L_cc):
        g = code.graph
        self.code = code
        self.L_cc = np.ascontiguousarray(L_cc, dtype=np.float64)
        if self.L_cc.shape != (code.n,):
            raise ConfigurationError(f"channel LLR length {self.L_cc.size} != n={code.n}")
        self.L_vc = np.zeros(g.num_edges)
        self.L_cv = np.zeros(g.num_edges)
        self.L_M = np.zeros(code.k)
        self.L_up = np.zeros(code.k)
        self.check_sums = np.zeros(code.n)
        self.posterior = self.L_cc.copy()
        self.success = False
        self.local_iterations = 0

    @property
    def info(self) -> np.ndarray:
        return self.code.info_positions

    def to_markov_llr(self) -> np.ndarray:
        """LLR handed to the BCJR decoder: everything except its own extrinsic."""
        i = self.info
        return self.L_cc[i] + self.check_sums[i] + self.L_up

    def systematic_posterior(self) -> np.ndarray:
        i = self.info
        return self.L_cc[i] + self.L_M + self.L_up + self.check_sums[i]

    def hard_word(self) -> np.ndarray:
        return hard_decision(self.posterior)

    def unsatisfied_checks(self) -> int:
        return unsatisfied_checks(self.code.graph, self.hard_word())


def posterior_llr(state: ChannelState) -> np.ndarray:
    return state.systematic_posterior()


def to_markov_llr(state: ChannelState) -> np.ndarray:
    return state.to_markov_llr()


def local_iteration(state: ChannelState, trellis: MarkovTrellis | None, config: DecoderConfig) -> None:
    """One flooding SP round followed by one BCJR activation."""
    g = state.code.graph
    i = state.info
    prior = state.L_cc.copy()
    if config.use_markov or config.use_cross:
        prior[i] += state.L_M + state.L_up
    sp_round(g, prior, state.L_cv, state.L_vc, config.clamp)
    state.check_sums = check_sums(g, state.L_cv)
    if config.use_markov:
        bcjr_extrinsic(trellis, state.to_markov_llr(), config.clamp, out=state.L_M)
    post = state.L_cc + state.check_sums
    post[i] = state.systematic_posterior()
    state.posterior = post
    state.local_iterations += 1


@dataclass
class DecodeResult:
    bits: np.ndarray                 # (2, k) decoded source bits
    success: np.ndarray              # (2,) zero-syndrome flags
    local_iterations: np.ndarray     # (2,) total local iterations per channel
    global_iterations: int
    trace: list = field(default_factory=list)


def _check_inputs(obs1, obs2, code1, code2, trellis, config):
    if code1.k != code2.k:
        raise ConfigurationError(f"codes disagree on k: {code1.k} vs {code2.k}")
    if code1.n != code2.n:
        raise ConfigurationError(f"codes disagree on n: {code1.n} vs {code2.n}")
    if not math.isclose(obs1.sigma2, obs2.sigma2, rel_tol=1e-12):
        raise ConfigurationError("both channels must share the same noise variance")
    if config.use_markov and (trellis is None or trellis.length != code1.k):
        raise ConfigurationError("Markov trellis length must equal k")


def decode_frame(obs1: ChannelObservation, obs2: ChannelObservation,
                 code1: SystematicCode, code2: SystematicCode,
                 trellis: MarkovTrellis | None, config: DecoderConfig,
                 callback=None) -> DecodeResult:
    """Jointly decode one pair of received frames.

    ``callback(channel, global_iter, local_iter, state)`` is invoked after
    every local iteration (0-based channel index, 1-based counters).
    """
    _check_inputs(obs1, obs2, code1, code2, trellis, config)
    states = [ChannelState(code1, channel_llr(obs1)), ChannelState(code2, channel_llr(obs2))]
    return run_decoder(states, trellis, config, callback)


def run_decoder(states, trellis, config: DecoderConfig, callback=None) -> DecodeResult:
    """Global/local iteration schedule over already-initialised channel states."""
    trace = []
    # without the cross exchange a second global round only adds local iterations
    n_global = config.max_global if config.use_cross else 1
    ell = 0
    for ell in range(1, n_global + 1):
        for q, st in enumerate(states):
            if st.success:
                continue
            for j in range(1, config.max_local + 1):
                before = st.posterior
                local_iteration(st, trellis, config)
                bad = st.unsatisfied_checks()
                st.success = bad == 0
                if config.trace:
                    trace.append({"channel": q + 1, "global": ell, "local": j,
                                  "mean_abs_llr": float(np.mean(np.abs(st.posterior))),
                                  "unsatisfied": bad})
                if callback is not None:
                    callback(q, ell, j, st)
                if st.success:
                    break
                thr = config.llr_change_threshold
                if thr is not None and np.max(np.abs(st.posterior - before)) < thr:
                    break
        if all(st.success for st in states) or ell == n_global:
            break
        post1 = states[0].systematic_posterior()
        post2 = states[1].systematic_posterior()
        zhat = estimate_error_vector(hard_decision(post1), hard_decision(post2))
        lz = error_llr(zhat, config.error_llr_form, config.signed_error_llr)
        send1, send2 = post1, post2
        if config.cross_input == "extrinsic":
            # strip what each channel was told by the other one last round
            send1 = post1 - states[0].L_up
            send2 = post2 - states[1].L_up
        # Jacobi exchange: both updates use this round's posteriors
        states[0].L_up = cross_update(lz, send2, config.clamp)
        states[1].L_up = cross_update(lz, send1, config.clamp)
    bits = np.stack([hard_decision(st.systematic_posterior()) for st in states])
    return DecodeResult(bits=bits,
                        success=np.array([st.success for st in states]),
                        local_iterations=np.array([st.local_iterations for st in states]),
                        global_iterations=ell,
                        trace=trace)
