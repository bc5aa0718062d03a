"""Joint source-channel decoding of two correlated binary Markov sources over LDPC-coded AWGN links."""

from .channel import ChannelObservation, channel_llr, sigma_from_eso_n0, transmit
from .jscd_decoder import MODES, DecoderConfig, DecodeResult, decode_frame
from .ldpc_code import SystematicCode, TannerGraph, build_code, encode, lambda_A, lambda_B, syndrome
from .limits import limit_for, shannon_sw_limit
from .markov_bcjr import MarkovTrellis, bcjr_extrinsic
from .sim_harness import SimConfig, SimResult, run_point, run_sweep
from .source_model import CorrelationParams, MarkovParams, apply_correlation, generate_markov

__version__ = "0.1.0"
