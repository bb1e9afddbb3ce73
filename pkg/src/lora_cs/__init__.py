"""Compressive-sensing compression and cloud-side demodulation of LoRa symbols."""
from .channel import ChannelConfig, apply_awgn, broadcast
from .cs import (
    CompressedVector,
    Dictionary,
    MeasurementMatrix,
    RatioPolicy,
    build_dictionary,
    build_measurement,
    compress,
    compression_ratio,
    min_measurements,
    select_ratio,
)
from .joint import GatewayObservation, WeightingScheme, estimate_snr, joint_demodulate
from .kernels import BACKEND
from .phy import ChirpParams, Packet, Symbol, extract_block, fft_demodulate, make_chirp, modulate_packet
from .recovery import (
    ResidualProfile,
    SparseSolution,
    demodulate_compressed,
    realify,
    refit_profile,
    residual_profile,
    solve_l1,
)

__version__ = "0.1.0"
