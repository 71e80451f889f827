"""Phase-coherence causal decomposition of a pair of time series.

The pair is decomposed jointly into scale-aligned IMF pairs. One pair is
selected as carrying the interaction: its mean instantaneous phases must
agree (ratio close to ``gamma``) and, among those that do, it has the largest
frequency-weighted Hilbert energy. Causal strength in each direction is the
change in phase coherence of that pair after the member IMF is subtracted
from the effect series and the pair is decomposed again.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .emd import Decomposition, EmdConfig, NoiseConfig, eemd, na_memd
from .errors import (
    DegenerateRemovalError,
    EmptyDecompositionError,
    InvalidArgumentError,
    NaCausalError,
    UndefinedPhaseError,
)
from .hilbert import EdgeTrim, analytic_signal, hilbert_energy, mean_frequency, mean_phase
from .signal import MIN_DECOMPOSITION_LENGTH, TimeSeries, as_series, segment

METHODS = ("na-memd", "eemd")
NORMALIZATION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PairSelectionConfig:
    """Phase-ratio constraint ``|mean(phi1)/mean(phi2) - gamma| < delta``."""

    gamma: float = 1.0
    delta: float = 0.1
    trim: EdgeTrim = EdgeTrim()

    def __post_init__(self):
        if not self.gamma > 0 or not self.delta > 0:
            raise InvalidArgumentError("gamma and delta must be positive")


@dataclass(frozen=True)
class CausalConfig:
    """Everything that determines a causal decomposition besides the data."""

    method: str = "na-memd"
    noise: NoiseConfig = NoiseConfig()
    n_directions: int = 64
    emd: EmdConfig = EmdConfig()
    selection: PairSelectionConfig = PairSelectionConfig()
    ensemble_size: int = 100

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.n_directions < 1:
            raise InvalidArgumentError("n_directions must be >= 1")
        if self.ensemble_size < 1:
            raise InvalidArgumentError("ensemble_size must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SelectedPair:
    index: int
    F1: np.ndarray
    F2: np.ndarray
    mean_frequencies: tuple
    phase_ratio: float
    fallback: bool = False

    @property
    def mean_frequency(self) -> float:
        return 0.5 * (self.mean_frequencies[0] + self.mean_frequencies[1])


@dataclass(frozen=True, eq=False)
class CausalResult:
    pair: SelectedPair
    eta_baseline: float
    sigma_u1_to_u2: float
    sigma_u2_to_u1: float
    C_u1_to_u2: float
    C_u2_to_u1: float
    eta_removed: dict = field(default_factory=dict)
    per_imf_C: Optional[list] = None
    config: Optional[CausalConfig] = None

    def __post_init__(self):
        etas = [self.eta_baseline, *self.eta_removed.values()]
        pairs = [(self.C_u1_to_u2, self.C_u2_to_u1)] + [c for c in (self.per_imf_C or []) if c is not None]
        if any(not 0.0 <= e <= 1.0 for e in etas):
            raise NaCausalError(f"phase coherence outside [0, 1]: {etas}")
        if self.sigma_u1_to_u2 < 0 or self.sigma_u2_to_u1 < 0:
            raise NaCausalError("negative causal strength")
        for c12, c21 in pairs:
            if not (0.0 <= c12 <= 1.0 and 0.0 <= c21 <= 1.0) or abs(c12 + c21 - 1.0) > NORMALIZATION_TOLERANCE:
                raise NaCausalError(f"relative strengths ({c12}, {c21}) are not normalised")

    def to_dict(self) -> dict:
        doc = {
            "pair_index": self.pair.index,
            "phase_ratio": self.pair.phase_ratio,
            "mean_frequencies": list(self.pair.mean_frequencies),
            "eta_baseline": self.eta_baseline,
            "eta_removed": dict(self.eta_removed),
            "sigma": {"u1_to_u2": self.sigma_u1_to_u2, "u2_to_u1": self.sigma_u2_to_u1},
            "C": {"u1_to_u2": self.C_u1_to_u2, "u2_to_u1": self.C_u2_to_u1},
            "fallback_flag": self.pair.fallback,
            "per_imf": [
                None if c is None else {"u1_to_u2": c[0], "u2_to_u1": c[1]} for c in (self.per_imf_C or [])
            ],
        }
        if self.config is not None:
            doc["config_echo"] = self.config.to_dict()
            doc["seed"] = self.config.noise.seed
        return doc


@dataclass(frozen=True, eq=False)
class WindowedCausality:
    windows: list
    E1: float
    E2: float
    N1: int
    N2: int
    ties: int
    window_length: int

    def to_dict(self) -> dict:
        return {
            "window_length": self.window_length,
            "windows": [w.to_dict() for w in self.windows],
            "E1": self.E1,
            "E2": self.E2,
            "N1": self.N1,
            "N2": self.N2,
            "ties": self.ties,
        }


# --- building blocks ---------------------------------------------------------

def decompose_pair(u1, u2, config: CausalConfig = CausalConfig()) -> Decomposition:
    """Two-channel decomposition with the configured method.

    EEMD decomposes each series on its own (noise stream keyed by channel), so
    the IMF counts may disagree; the longer stack folds its surplus slow
    modes into its residual so that indices can still be paired.
    """
    u1, u2 = as_series(u1, label="u1"), as_series(u2, label="u2")
    if len(u1) != len(u2):
        raise InvalidArgumentError(f"series lengths differ: {len(u1)} vs {len(u2)}")
    if config.method == "na-memd":
        return na_memd(u1, u2, config.noise, config.n_directions, config.emd)
    parts = [eemd(u, config.ensemble_size, config.noise, config.emd, stream=i) for i, u in enumerate((u1, u2))]
    k = min(p.n_imfs for p in parts)
    data = np.stack([u1.samples, u2.samples])
    imfs = np.stack([p.imfs[0, :k] for p in parts])
    return Decomposition(imfs, data - imfs.sum(axis=1), u1.sample_rate, (u1.label, u2.label))


def _pair_stats(d: Decomposition, k: int, trim: EdgeTrim):
    """(mean phases, mean frequencies) of pair ``k``; None if a member is zero."""
    stats = []
    for c in range(2):
        x = d.imfs[c, k]
        if not np.any(x):
            return None
        a = analytic_signal(TimeSeries(x, d.sample_rate))
        stats.append((mean_phase(a, trim), mean_frequency(a, trim)))
    return (stats[0][0], stats[1][0]), (stats[0][1], stats[1][1])


def select_imf_pair(d: Decomposition, cfg: PairSelectionConfig = PairSelectionConfig()) -> SelectedPair:
    """Choose the causal IMF pair.

    Pairs whose mean-phase ratio lies within ``delta`` of ``gamma`` compete on
    :func:`~nacausal.hilbert.hilbert_energy`. If none qualifies, the pair
    with the ratio closest to ``gamma`` is returned with ``fallback`` set.
    """
    if d.n_imfs == 0:
        raise EmptyDecompositionError("decomposition has no IMFs")
    if d.n_channels != 2:
        raise InvalidArgumentError("pair selection needs a two-channel decomposition")
    candidates = []
    for k in range(d.n_imfs):
        stats = _pair_stats(d, k, cfg.trim)
        if stats is None:
            continue
        (p1, p2), freqs = stats
        ratio = p1 / p2 if p2 != 0 else np.inf
        candidates.append((k, ratio, freqs))
    if not candidates:
        raise EmptyDecompositionError("every IMF pair has a zero member")

    passing = [c for c in candidates if abs(c[1] - cfg.gamma) < cfg.delta]
    if passing:
        energies = [
            hilbert_energy((TimeSeries(d.imfs[0, k], d.sample_rate), TimeSeries(d.imfs[1, k], d.sample_rate)), cfg.trim)
            for k, _, _ in passing
        ]
        k, ratio, freqs = passing[int(np.argmax(energies))]
        fallback = False
    else:
        k, ratio, freqs = min(candidates, key=lambda c: abs(c[1] - cfg.gamma))
        fallback = True
    return SelectedPair(k, d.imfs[0, k].copy(), d.imfs[1, k].copy(), tuple(freqs), float(ratio), fallback)


def coherence_of_phases(phi1, phi2) -> float:
    """``|mean_t exp(j (phi1 - phi2))|`` for two phase tracks, clipped to [0, 1]."""
    phi1, phi2 = np.asarray(phi1, dtype=float), np.asarray(phi2, dtype=float)
    if phi1.shape != phi2.shape or phi1.size == 0:
        raise InvalidArgumentError("phase tracks must be non-empty and of equal length")
    return float(min(abs(np.mean(np.exp(1j * (phi1 - phi2)))), 1.0))


def phase_coherence(F1, F2) -> float:
    """Phase coherence of two IMFs over the full record, in [0, 1].

    1 means phase locked (any constant offset), 0 means the phase difference
    is spread evenly around the circle.
    """
    f1, f2 = as_series(F1), as_series(F2)
    if len(f1) != len(f2):
        raise InvalidArgumentError("phase coherence needs equal-length inputs")
    return coherence_of_phases(analytic_signal(f1).phase, analytic_signal(f2).phase)


def relative_strength(sigma_12: float, sigma_21: float) -> tuple:
    """Normalise two absolute strengths to relative ones summing to 1.

    Both zero means nothing to tell apart, which maps to (0.5, 0.5).
    """
    if sigma_12 < 0 or sigma_21 < 0:
        raise InvalidArgumentError("causal strengths must be non-negative")
    total = sigma_12 + sigma_21
    if total == 0:
        return 0.5, 0.5
    return sigma_12 / total, sigma_21 / total


def _matched_coherence(u1, u2, target_frequency: float, config: CausalConfig) -> float:
    d = decompose_pair(u1, u2, config)
    if d.n_imfs == 0:
        raise DegenerateRemovalError("re-decomposition after IMF removal produced no IMFs")
    best, best_gap = None, np.inf
    for k in range(d.n_imfs):
        stats = _pair_stats(d, k, config.selection.trim)
        if stats is None:
            continue
        gap = abs(0.5 * (stats[1][0] + stats[1][1]) - target_frequency)
        if gap < best_gap:
            best, best_gap = k, gap
    if best is None:
        raise DegenerateRemovalError("re-decomposition after IMF removal has only zero IMF pairs")
    return phase_coherence(TimeSeries(d.imfs[0, best], d.sample_rate), TimeSeries(d.imfs[1, best], d.sample_rate))


def causal_strengths(u1, u2, pair: SelectedPair, config: CausalConfig = CausalConfig()) -> dict:
    """Absolute causal strengths of both directions for an already selected pair.

    For ``u1 -> u2`` the pair member ``F2`` is removed from ``u2``, the pair is
    decomposed again with the same configuration and seed, and the coherence
    of the IMF pair closest in mean frequency to the original is compared to
    the baseline coherence. ``u2 -> u1`` mirrors this with ``F1``.

    Returns a dict with ``eta_baseline``, ``eta_removed`` and both sigmas.
    """
    u1, u2 = as_series(u1, label="u1"), as_series(u2, label="u2")
    eta0 = phase_coherence(pair.F1, pair.F2)
    target = pair.mean_frequency
    eta_wo_f2 = _matched_coherence(u1, u2.replace(samples=u2.samples - pair.F2), target, config)
    eta_wo_f1 = _matched_coherence(u1.replace(samples=u1.samples - pair.F1), u2, target, config)
    return {
        "eta_baseline": eta0,
        "eta_removed": {"u1_to_u2": eta_wo_f2, "u2_to_u1": eta_wo_f1},
        "sigma_u1_to_u2": abs(eta0 - eta_wo_f2),
        "sigma_u2_to_u1": abs(eta0 - eta_wo_f1),
    }


# --- pipelines ---------------------------------------------------------------

def _canonical_order(u1: TimeSeries, u2: TimeSeries) -> bool:
    """True when the pair should be processed as (u2, u1).

    Pair selection compares a phase ratio against ``gamma``, which is not
    symmetric in its arguments. Processing every pair in one fixed order makes
    swapping the inputs swap the outputs exactly.
    """
    return u2.samples.tobytes() < u1.samples.tobytes()


def _check_pair(u1, u2):
    u1, u2 = as_series(u1, label="u1"), as_series(u2, label="u2")
    if len(u1) != len(u2):
        raise InvalidArgumentError(f"series lengths differ: {len(u1)} vs {len(u2)}")
    if len(u1) < MIN_DECOMPOSITION_LENGTH:
        raise InvalidArgumentError(f"series need at least {MIN_DECOMPOSITION_LENGTH} samples, got {len(u1)}")
    return u1, u2


def _swap_result(r: CausalResult, config: CausalConfig) -> CausalResult:
    p = r.pair
    pair = SelectedPair(p.index, p.F2, p.F1, p.mean_frequencies[::-1],
                        1.0 / p.phase_ratio if p.phase_ratio else np.inf, p.fallback)
    return CausalResult(
        pair, r.eta_baseline, r.sigma_u2_to_u1, r.sigma_u1_to_u2, r.C_u2_to_u1, r.C_u1_to_u2,
        {"u1_to_u2": r.eta_removed["u2_to_u1"], "u2_to_u1": r.eta_removed["u1_to_u2"]},
        None if r.per_imf_C is None else [None if c is None else (c[1], c[0]) for c in r.per_imf_C],
        config,
    )


def _decompose_ordered(u1, u2, config, per_imf):
    d = decompose_pair(u1, u2, config)
    pair = select_imf_pair(d, config.selection)
    s = causal_strengths(u1, u2, pair, config)
    c12, c21 = relative_strength(s["sigma_u1_to_u2"], s["sigma_u2_to_u1"])
    per = _per_imf(u1, u2, d, config) if per_imf else None
    return CausalResult(pair, s["eta_baseline"], s["sigma_u1_to_u2"], s["sigma_u2_to_u1"], c12, c21,
                        s["eta_removed"], per, config)


def causal_decompose(u1, u2, config: CausalConfig = CausalConfig(), per_imf: bool = False) -> CausalResult:
    """Full pipeline: decompose, select the causal pair, measure both directions.

    ``C_u1_to_u2`` near 1 means u1 drives u2; 0.5 means no or reciprocal
    causality. With ``per_imf`` the strengths of every scale are attached.
    """
    u1, u2 = _check_pair(u1, u2)
    if _canonical_order(u1, u2):
        return _swap_result(_decompose_ordered(u2, u1, config, per_imf), config)
    return _decompose_ordered(u1, u2, config, per_imf)


def _per_imf(u1, u2, d: Decomposition, config: CausalConfig) -> list:
    out = []
    for k in range(d.n_imfs):
        stats = _pair_stats(d, k, config.selection.trim)
        if stats is None:
            out.append(None)
            continue
        (p1, p2), freqs = stats
        pair = SelectedPair(k, d.imfs[0, k].copy(), d.imfs[1, k].copy(), tuple(freqs),
                            p1 / p2 if p2 != 0 else np.inf)
        try:
            s = causal_strengths(u1, u2, pair, config)
        except (DegenerateRemovalError, UndefinedPhaseError):
            out.append(None)
            continue
        out.append(relative_strength(s["sigma_u1_to_u2"], s["sigma_u2_to_u1"]))
    return out


def per_imf_causality(u1, u2, config: CausalConfig = CausalConfig()) -> list:
    """Relative strengths ``(C12, C21)`` for every scale; None where undefined."""
    u1, u2 = _check_pair(u1, u2)
    if _canonical_order(u1, u2):
        d = decompose_pair(u2, u1, config)
        return [None if c is None else (c[1], c[0]) for c in _per_imf(u2, u1, d, config)]
    return _per_imf(u1, u2, decompose_pair(u1, u2, config), config)


def windowed_causality(u1, u2, window_length: int, config: CausalConfig = CausalConfig()) -> WindowedCausality:
    """Causal decomposition per non-overlapping window plus accumulated totals.

    ``E1``/``E2`` sum the per-window relative strengths of u1->u2 and u2->u1;
    ``N1``/``N2`` count windows where that direction exceeds 0.5.
    """
    u1, u2 = _check_pair(u1, u2)
    if window_length > len(u1):
        raise InvalidArgumentError(f"window {window_length} is longer than the record ({len(u1)} samples)")
    plan, w1 = segment(u1, window_length)
    _, w2 = segment(u2, window_length)
    results = [causal_decompose(a, b, config) for a, b in zip(w1, w2)]
    c12 = [r.C_u1_to_u2 for r in results]
    c21 = [r.C_u2_to_u1 for r in results]
    n1 = sum(c > 0.5 for c in c12)
    n2 = sum(c > 0.5 for c in c21)
    return WindowedCausality(results, float(sum(c12)), float(sum(c21)), n1, n2, plan.count - n1 - n2,
                             plan.window_length)


__all__ = [
    "CausalConfig",
    "CausalResult",
    "NaCausalError",
    "PairSelectionConfig",
    "SelectedPair",
    "WindowedCausality",
    "causal_decompose",
    "causal_strengths",
    "coherence_of_phases",
    "decompose_pair",
    "per_imf_causality",
    "phase_coherence",
    "relative_strength",
    "select_imf_pair",
    "windowed_causality",
]
