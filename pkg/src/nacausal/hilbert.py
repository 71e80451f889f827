"""Analytic signals and the instantaneous quantities derived from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert as _hilbert

from ._kernels import local_extrema
from .errors import InvalidArgumentError, UndefinedPhaseError, UndefinedRatioError
from .signal import MIN_DECOMPOSITION_LENGTH, TimeSeries, as_series


@dataclass(frozen=True)
class EdgeTrim:
    """Fraction of samples dropped at each end before time averaging."""

    fraction: float = 0.05

    def __post_init__(self):
        if not 0 <= self.fraction < 0.5:
            raise InvalidArgumentError(f"trim fraction must lie in [0, 0.5), got {self.fraction}")

    def bounds(self, n: int) -> tuple:
        cut = int(np.floor(self.fraction * n))
        return cut, n - cut


@dataclass(frozen=True, eq=False)
class AnalyticSeries:
    """Instantaneous amplitude, unwrapped phase (rad) and frequency (Hz)."""

    amplitude: np.ndarray
    phase: np.ndarray
    inst_frequency: np.ndarray
    sample_rate: float

    def __len__(self) -> int:
        return self.amplitude.shape[0]


def _mirror_extension(x: np.ndarray) -> tuple:
    """Extend ``x`` by its own length on both sides, reflecting about the
    outermost extrema. Returns (extended, offset of x inside it)."""
    n = x.shape[0]
    imax, imin = local_extrema(x)
    if imax.size + imin.size < 2:
        return x, 0
    p = min(imax.min(initial=n), imin.min(initial=n))
    q = max(imax.max(initial=-1), imin.max(initial=-1))
    span = q - p
    if span < 1:
        return x, 0
    i = np.arange(-n, 2 * n)
    r = np.mod(i - p, 2 * span)
    idx = p + np.where(r <= span, r, 2 * span - r)
    ext = x[idx]
    ext[n:2 * n] = x
    return ext, n


def _unwrap(angle: np.ndarray) -> np.ndarray:
    # np.unwrap leaves steps in [-pi, pi]; fold -pi onto pi so every step is in (-pi, pi]
    steps = np.diff(np.unwrap(angle))
    steps[steps <= -np.pi] += 2 * np.pi
    steps[steps > np.pi] -= 2 * np.pi
    return np.concatenate(([angle[0]], angle[0] + np.cumsum(steps)))


def analytic_signal(imf, boundary: str = "mirror") -> AnalyticSeries:
    """Analytic signal of one real series.

    Built in the frequency domain (negative frequencies zeroed, positive ones
    doubled, DC and Nyquist kept). Instantaneous frequency is the central
    difference of the unwrapped phase, one-sided at the ends.

    Parameters
    ----------
    imf : TimeSeries or array_like
    boundary : {"mirror", "none"}
        ``"mirror"`` applies the transform to a copy extended by reflection
        about the first and last extrema and keeps the original span. This
        removes most of the leakage a non-periodic record suffers at its
        ends. ``"none"`` transforms the record as is (circular).
    """
    ts = as_series(imf)
    x = ts.samples
    if x.shape[0] < MIN_DECOMPOSITION_LENGTH:
        raise InvalidArgumentError(f"analytic_signal needs at least {MIN_DECOMPOSITION_LENGTH} samples")
    if not np.any(x):
        raise UndefinedPhaseError("phase of an all-zero series is undefined")
    if boundary == "mirror":
        ext, off = _mirror_extension(x)
        z = _hilbert(ext)[off:off + x.shape[0]]
    elif boundary == "none":
        z = _hilbert(x)
    else:
        raise InvalidArgumentError(f"unknown boundary mode {boundary!r}")
    phase = _unwrap(np.angle(z))
    freq = np.gradient(phase) * ts.sample_rate / (2 * np.pi)
    return AnalyticSeries(np.abs(z), phase, freq, ts.sample_rate)


def _interior(a: AnalyticSeries, trim: EdgeTrim) -> slice:
    lo, hi = trim.bounds(len(a))
    if hi <= lo:
        raise InvalidArgumentError("trimmed region is empty")
    return slice(lo, hi)


def mean_phase(a: AnalyticSeries, trim: EdgeTrim = EdgeTrim()) -> float:
    """Arithmetic mean of the unwrapped phase over the trimmed interior."""
    return float(np.mean(a.phase[_interior(a, trim)]))


def mean_frequency(a: AnalyticSeries, trim: EdgeTrim = EdgeTrim()) -> float:
    """Energy-weighted mean instantaneous frequency, ``sum(a^2 f) / sum(a^2)``."""
    sl = _interior(a, trim)
    w = a.amplitude[sl] ** 2
    total = w.sum()
    if total == 0:
        raise UndefinedRatioError("zero energy in the trimmed interior")
    return float(np.dot(w, a.inst_frequency[sl]) / total)


def _energy_term(x, sample_rate, trim):
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return 0.0
    a = analytic_signal(TimeSeries(x, sample_rate))
    sl = _interior(a, trim)
    # negative frequencies are unwrap artefacts; they must not earn rank
    f = np.clip(a.inst_frequency[sl], 0.0, None)
    return float(np.dot(a.amplitude[sl] ** 2, f)) / sample_rate


def hilbert_energy(imf_pair, trim: EdgeTrim = EdgeTrim()) -> float:
    """Frequency-weighted Hilbert energy of an IMF pair, used to rank pairs.

    ``sum_t (a1^2 f1 + a2^2 f2) / sample_rate`` over the trimmed interior,
    with negative instantaneous frequencies clamped to zero.
    """
    first, second = (as_series(x) for x in imf_pair)
    if len(first) != len(second):
        raise InvalidArgumentError("IMF pair members must have equal length")
    return _energy_term(first.samples, first.sample_rate, trim) + _energy_term(second.samples, second.sample_rate, trim)
