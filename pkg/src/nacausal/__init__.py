"""Noise-assisted multivariate EMD causal decomposition for pairs of time series."""

from .causality import (
    CausalConfig,
    CausalResult,
    PairSelectionConfig,
    causal_decompose,
    per_imf_causality,
    phase_coherence,
    relative_strength,
    select_imf_pair,
    windowed_causality,
)
from .emd import Decomposition, EmdConfig, NoiseConfig, eemd, emd, generate_directions, memd, na_memd
from .granger import granger_pairwise
from .hilbert import EdgeTrim, analytic_signal, hilbert_energy, mean_frequency, mean_phase
from .signal import MultichannelSignal, TimeSeries, decimate, lag_shift, read_csv, segment
from .systems import ar_stochastic, logistic_coupled, white_noise_pair

__version__ = "0.1.0"

__all__ = [
    "CausalConfig", "CausalResult", "Decomposition", "EdgeTrim", "EmdConfig", "MultichannelSignal",
    "NoiseConfig", "PairSelectionConfig", "TimeSeries", "analytic_signal", "ar_stochastic",
    "causal_decompose", "decimate", "eemd", "emd", "generate_directions", "granger_pairwise",
    "hilbert_energy", "lag_shift", "logistic_coupled", "mean_frequency", "mean_phase", "memd", "na_memd",
    "per_imf_causality", "phase_coherence", "read_csv", "relative_strength", "segment", "select_imf_pair",
    "white_noise_pair", "windowed_causality",
]
