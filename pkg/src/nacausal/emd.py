"""Empirical mode decomposition: univariate EMD, EEMD, MEMD and NA-MEMD.

Envelopes are not-a-knot cubic splines through the extrema, with two
extrema mirrored across each edge (Rilling-style symmetric extension).
Multivariate envelopes follow the MEMD recipe: project the channels on a set
of unit directions, locate extrema of each projection, spline the full
multichannel signal through those locations and average the envelope means
over directions.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels as _k
from .errors import InvalidArgumentError, NotEnoughExtrema, UndefinedRatioError
from .signal import MIN_DECOMPOSITION_LENGTH, MultichannelSignal, TimeSeries, as_series, format_float

__all__ = [
    "EmdConfig",
    "NoiseConfig",
    "DirectionSet",
    "Decomposition",
    "find_extrema",
    "envelope_mean",
    "emd",
    "eemd",
    "halton",
    "generate_directions",
    "project",
    "memd",
    "na_memd",
    "orthogonality_index",
    "separability_index",
    "write_decomposition_csv",
]


@dataclass(frozen=True)
class EmdConfig:
    """Sifting parameters shared by every decomposition flavour.

    A sift stops once the energy ratio of the removed envelope mean to the
    current candidate drops below ``sift_tolerance`` while extrema and zero
    crossings differ by at most one, or after ``max_sift_iterations``.
    """

    max_sift_iterations: int = 15
    sift_tolerance: float = 0.2
    max_imf_count: Optional[int] = None
    boundary_extension: int = 2

    def __post_init__(self):
        if self.max_sift_iterations < 1:
            raise InvalidArgumentError("max_sift_iterations must be >= 1")
        if self.boundary_extension < 1:
            raise InvalidArgumentError("boundary_extension must be >= 1")
        if not self.sift_tolerance > 0:
            raise InvalidArgumentError("sift_tolerance must be positive")
        if self.max_imf_count is not None and self.max_imf_count < 0:
            raise InvalidArgumentError("max_imf_count must be >= 0")


@dataclass(frozen=True)
class NoiseConfig:
    """White-noise assistance: ``noise_channel_count`` extra channels (NA-MEMD)
    or per-member perturbations (EEMD) with standard deviation
    ``noise_level`` times the data standard deviation."""

    noise_channel_count: int = 2
    noise_level: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.noise_channel_count < 1:
            raise InvalidArgumentError("noise_channel_count must be >= 1")
        if not self.noise_level > 0:
            raise InvalidArgumentError("noise_level must be positive")


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Hammersley points and the unit vectors derived from them.

    ``unit_vectors`` has one row per projection. With ``mirrored`` set, rows
    come in adjacent pairs ``(r, r')`` where ``r'`` swaps the first two
    coordinates of ``r``; the set is then invariant under exchanging the two
    leading channels.
    """

    hammersley_points: np.ndarray
    unit_vectors: np.ndarray
    mirrored: bool = False

    @property
    def point_count(self) -> int:
        return self.hammersley_points.shape[0]

    @property
    def dimension(self) -> int:
        return self.unit_vectors.shape[1]

    def __len__(self) -> int:
        return self.unit_vectors.shape[0]


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Channel-aligned IMF stacks.

    Attributes
    ----------
    imfs : ndarray, shape (channels, K, samples)
    residual : ndarray, shape (channels, samples)
    """

    imfs: np.ndarray
    residual: np.ndarray
    sample_rate: float = 1.0
    labels: tuple = ()

    def __post_init__(self):
        imfs = np.asarray(self.imfs, dtype=float)
        residual = np.asarray(self.residual, dtype=float)
        if imfs.ndim != 3 or residual.ndim != 2 or imfs.shape[0] != residual.shape[0]:
            raise InvalidArgumentError("imfs must be (channels, K, samples) and residual (channels, samples)")
        if imfs.shape[2] != residual.shape[1]:
            raise InvalidArgumentError("IMF and residual lengths differ")
        imfs.setflags(write=False)
        residual.setflags(write=False)
        object.__setattr__(self, "imfs", imfs)
        object.__setattr__(self, "residual", residual)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"ch{i}" for i in range(imfs.shape[0])))

    @property
    def n_channels(self) -> int:
        return self.imfs.shape[0]

    @property
    def n_imfs(self) -> int:
        return self.imfs.shape[1]

    def __len__(self) -> int:
        return self.imfs.shape[2]

    def imf(self, channel: int, k: int) -> TimeSeries:
        return TimeSeries(self.imfs[channel, k], self.sample_rate, f"{self.labels[channel]}_imf{k}")

    def reconstruct(self, channel: int) -> np.ndarray:
        return self.imfs[channel].sum(axis=0) + self.residual[channel]

    def select_channels(self, channels: Sequence[int]) -> "Decomposition":
        channels = list(channels)
        return Decomposition(
            self.imfs[channels], self.residual[channels], self.sample_rate,
            tuple(self.labels[c] for c in channels),
        )


# --- extrema and envelopes ---------------------------------------------------

_UNIT = np.ones((1, 1))


def find_extrema(series) -> tuple:
    """Indices of local maxima and minima, ascending.

    Endpoints never count; a flat run counts once at its midpoint.

    Raises
    ------
    NotEnoughExtrema
        With fewer than two maxima or two minima.
    """
    x = np.ascontiguousarray(as_series(series).samples)
    if x.shape[0] < 3:
        raise InvalidArgumentError("find_extrema needs at least 3 samples")
    imax, imin = _k.local_extrema(x)
    if imax.size < 2 or imin.size < 2:
        raise NotEnoughExtrema(f"{imax.size} maxima, {imin.size} minima")
    return imax, imin


def envelope_mean(series, extrema=None, boundary_extension: int = 2) -> TimeSeries:
    """Pointwise mean of the upper and lower cubic-spline envelopes.

    ``extrema`` may carry the result of :func:`find_extrema`; envelopes are
    always knotted at the series' own extrema.
    """
    ts = as_series(series)
    if extrema is not None:
        imax, imin = extrema
        if len(imax) < 2 or len(imin) < 2:
            raise NotEnoughExtrema(f"{len(imax)} maxima, {len(imin)} minima")
    h = np.ascontiguousarray(ts.samples).reshape(-1, 1)
    mean, count, _ = _k.directional_mean(h, _UNIT, boundary_extension)
    if count == 0:
        raise NotEnoughExtrema("series lacks two maxima and two minima")
    return ts.replace(samples=mean[:, 0], label=f"{ts.label}_envmean")


# --- univariate EMD ----------------------------------------------------------

def _check_length(n: int):
    if n < MIN_DECOMPOSITION_LENGTH:
        raise InvalidArgumentError(f"decomposition needs at least {MIN_DECOMPOSITION_LENGTH} samples, got {n}")


def _emd_array(x: np.ndarray, config: EmdConfig) -> np.ndarray:
    """IMFs of ``x`` as a (K, n) array."""
    n = x.shape[0]
    imfs = _memd_array(x.reshape(n, 1), _UNIT, config)
    return imfs[:, :, 0]


def emd(series, config: EmdConfig = EmdConfig()) -> Decomposition:
    """Univariate EMD of one series, returned as a one-channel Decomposition."""
    ts = as_series(series)
    _check_length(len(ts))
    x = ts.samples
    imfs = _emd_array(x, config)
    residual = x - imfs.sum(axis=0)
    return Decomposition(imfs[None], residual[None], ts.sample_rate, (ts.label or "ch0",))


def _member_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)))


def eemd(series, ensemble_size: int = 100, noise: NoiseConfig = NoiseConfig(), config: EmdConfig = EmdConfig(),
         stream: int = 0) -> Decomposition:
    """Ensemble EMD.

    Member ``i`` decomposes ``x + noise_level * std(x) * w_i`` where ``w_i`` is
    drawn from a stream keyed by ``(seed, stream, i)``. Members are aligned on
    the modal IMF count: surplus IMFs fold into that member's residual, and
    members with fewer IMFs contribute zeros for the missing ones.
    """
    ts = as_series(series)
    _check_length(len(ts))
    if ensemble_size < 1:
        raise InvalidArgumentError("ensemble_size must be >= 1")
    x = ts.samples
    n = x.shape[0]
    amplitude = noise.noise_level * float(np.std(x))
    members = []
    for i in range(ensemble_size):
        w = _member_rng(noise.seed, stream, i).standard_normal(n)
        members.append(_emd_array(x + amplitude * w, config))
    counts = Counter(m.shape[0] for m in members)
    modal = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    total = np.zeros((modal, n))
    for m in members:
        k = min(modal, m.shape[0])
        total[:k] += m[:k]
    imfs = total / ensemble_size
    residual = x - imfs.sum(axis=0)
    return Decomposition(imfs[None], residual[None], ts.sample_rate, (ts.label or "ch0",))


# --- quasi-random directions -------------------------------------------------

def _first_primes(count: int) -> list:
    primes, candidate = [], 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def halton(i, base: int):
    """Radical inverse of the integer(s) ``i`` in ``base``.

    Digits of ``i`` in ``base`` are reflected about the radix point, so
    ``halton(1, 2) == 0.5`` and ``halton(3, 3) == 1/9``.
    """
    i = np.asarray(i, dtype=np.int64)
    if base < 2:
        raise InvalidArgumentError("base must be >= 2")
    result = np.zeros(i.shape, dtype=float)
    scale = 1.0 / base
    rest = i.copy()
    while np.any(rest > 0):
        result += (rest % base) * scale
        rest //= base
        scale /= base
    return result if result.ndim else float(result)


def _sphere_from_angles(angles: np.ndarray) -> np.ndarray:
    # standard hyperspherical -> Cartesian map, one row per direction
    n, k = angles.shape
    out = np.ones((n, k + 1))
    sin_prod = np.ones(n)
    for j in range(k):
        out[:, j] = sin_prod * np.cos(angles[:, j])
        sin_prod = sin_prod * np.sin(angles[:, j])
    out[:, k] = sin_prod
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def generate_directions(dimension: int, n_points: int = 64, mirrored: bool = False) -> DirectionSet:
    """Hammersley direction vectors on the unit sphere in R^dimension.

    Point ``i`` (1-based) is ``(i/N, d_i^{p1}, ..., d_i^{p(dimension-1)})`` with
    ``d^p`` the base-``p`` Halton sequence over the first primes. The leading
    ``dimension-1`` coordinates become hyperspherical angles, the first
    ``dimension-2`` scaled to [0, pi] and the next to [0, 2pi), and are mapped
    to Cartesian unit vectors.
    """
    if dimension < 2:
        raise InvalidArgumentError("dimension must be >= 2")
    if n_points < 1:
        raise InvalidArgumentError("n_points must be >= 1")
    idx = np.arange(1, n_points + 1)
    cols = [idx / n_points] + [halton(idx, p) for p in _first_primes(dimension - 1)]
    points = np.column_stack(cols)
    # i/N reaches 1 at i = N; wrap it so every coordinate lies in [0, 1)
    points[:, 0] = np.mod(points[:, 0], 1.0)
    angles = points[:, : dimension - 1].copy()
    angles[:, :-1] *= np.pi
    angles[:, -1] *= 2 * np.pi
    vectors = _sphere_from_angles(angles)
    if mirrored:
        swapped = vectors.copy()
        swapped[:, [0, 1]] = swapped[:, [1, 0]]
        vectors = np.stack([vectors, swapped], axis=1).reshape(-1, dimension)
    points.setflags(write=False)
    vectors.setflags(write=False)
    return DirectionSet(points, vectors, mirrored)


def project(signal: MultichannelSignal, direction) -> TimeSeries:
    """Per-sample inner product of the channels with ``direction``."""
    direction = np.asarray(direction, dtype=float)
    if direction.ndim != 1 or direction.shape[0] != signal.n_channels:
        raise InvalidArgumentError(
            f"direction has dimension {direction.shape}, signal has {signal.n_channels} channels"
        )
    y = _k.project(np.ascontiguousarray(signal.to_array().T), direction)
    return TimeSeries(y, signal.sample_rate, "projection")


# --- multivariate EMD --------------------------------------------------------

def _channel_total(per_channel: np.ndarray) -> float:
    # sum the two leading channels first so the total is exchange-symmetric
    if per_channel.shape[0] < 2:
        return float(per_channel.sum())
    return float((per_channel[0] + per_channel[1]) + per_channel[2:].sum())


def _memd_array(x: np.ndarray, directions: np.ndarray, config: EmdConfig) -> np.ndarray:
    """MEMD of ``x`` (samples x channels); returns IMFs as (K, samples, channels).

    Extraction ends when no projection of the residual has two maxima and two
    minima, or at ``max_imf_count``.
    """
    n = x.shape[0]
    nbsym = config.boundary_extension
    directions = np.ascontiguousarray(directions, dtype=float)
    imfs = []
    residual = np.ascontiguousarray(x, dtype=float)
    while config.max_imf_count is None or len(imfs) < config.max_imf_count:
        mean, count, shaped = _k.directional_mean(residual, directions, nbsym)
        if count == 0:
            break
        h = residual
        for _ in range(config.max_sift_iterations):
            energy = _channel_total(np.einsum("tc,tc->c", h, h))
            sd = _channel_total(np.einsum("tc,tc->c", mean, mean)) / energy if energy > 0 else 0.0
            h = h - mean
            mean, count, shaped = _k.directional_mean(h, directions, nbsym)
            if count == 0 or (sd < config.sift_tolerance and shaped):
                break
        imfs.append(h)
        residual = residual - h
    return np.array(imfs).reshape(len(imfs), n, x.shape[1])


def memd(signal: MultichannelSignal, directions: DirectionSet, config: EmdConfig = EmdConfig()) -> Decomposition:
    """Multivariate EMD; every channel receives the same number of IMFs."""
    if signal.n_channels < 2:
        raise InvalidArgumentError("memd needs at least 2 channels")
    if directions.dimension != signal.n_channels:
        raise InvalidArgumentError(
            f"direction dimension {directions.dimension} != channel count {signal.n_channels}"
        )
    _check_length(len(signal))
    x = signal.to_array().T
    imfs = _memd_array(x, directions.unit_vectors, config)
    imfs = np.transpose(imfs, (2, 0, 1))
    residual = x.T - imfs.sum(axis=1)
    labels = tuple(ch.label or f"ch{i}" for i, ch in enumerate(signal.channels))
    return Decomposition(imfs, residual, signal.sample_rate, labels)


def noise_channels(n_samples: int, noise: NoiseConfig, scale: float) -> np.ndarray:
    """The (m, n_samples) white-noise block; channel ``j`` uses stream ``(seed, j)``."""
    return np.stack([
        scale * _member_rng(noise.seed, j).standard_normal(n_samples)
        for j in range(noise.noise_channel_count)
    ])


def na_memd(u1, u2, noise: NoiseConfig = NoiseConfig(), n_directions: int = 64,
            config: EmdConfig = EmdConfig(), directions: Optional[DirectionSet] = None) -> Decomposition:
    """Noise-assisted MEMD of a pair of series.

    The pair is stacked with ``noise.noise_channel_count`` white-noise
    channels of standard deviation ``noise_level`` times the mean of the two
    data standard deviations, decomposed jointly, and only the two data
    channels are returned.

    The default direction set pairs each of ``n_directions`` Hammersley
    directions with its (u1, u2)-swapped mirror, so decomposing ``(u2, u1)``
    gives exactly the channel-swapped result.
    """
    u1, u2 = as_series(u1), as_series(u2)
    if len(u1) != len(u2):
        raise InvalidArgumentError(f"series lengths differ: {len(u1)} vs {len(u2)}")
    if u1.sample_rate != u2.sample_rate:
        raise InvalidArgumentError("series sample rates differ")
    _check_length(len(u1))
    n = len(u1)
    dim = 2 + noise.noise_channel_count
    if directions is None:
        directions = generate_directions(dim, n_directions, mirrored=True)
    elif directions.dimension != dim:
        raise InvalidArgumentError(f"direction dimension {directions.dimension} != channel count {dim}")
    scale = noise.noise_level * 0.5 * (float(np.std(u1.samples)) + float(np.std(u2.samples)))
    x = np.column_stack([u1.samples, u2.samples, noise_channels(n, noise, scale).T])
    imfs = _memd_array(x, directions.unit_vectors, config)[:, :, :2]
    imfs = np.transpose(imfs, (2, 0, 1))
    data = np.stack([u1.samples, u2.samples])
    residual = data - imfs.sum(axis=1)
    return Decomposition(imfs, residual, u1.sample_rate, (u1.label or "u1", u2.label or "u2"))


# --- diagnostics -------------------------------------------------------------

def orthogonality_index(d: Decomposition, channel: int = 0) -> float:
    """Cross-term energy between distinct IMFs relative to the signal energy.

    ``|sum_t sum_{j != k} c_j c_k| / sum_t x^2`` with ``x`` the reconstructed
    channel; 0 for mutually orthogonal modes.
    """
    c = d.imfs[channel]
    if c.shape[0] < 2:
        raise InvalidArgumentError("orthogonality_index needs at least 2 IMFs")
    x = d.reconstruct(channel)
    energy = float(np.dot(x, x))
    if energy == 0:
        raise UndefinedRatioError("orthogonality index of a zero-energy signal")
    total = c.sum(axis=0)
    cross = float(np.dot(total, total) - np.einsum("kt,kt->", c, c))
    return abs(cross) / energy


def separability_index(d: Decomposition, channel: int | None = None) -> float:
    """Mean spectral overlap of adjacent IMFs within each channel.

    Overlap is the inner product of unit-normalised magnitude spectra, so it
    lies in [0, 1]: 0 for disjoint bands, 1 for identical spectra. Zero IMFs
    contribute zero overlap. ``channel`` restricts the average to one channel.
    """
    if d.n_imfs < 2:
        raise InvalidArgumentError("separability_index needs at least 2 IMFs per channel")
    imfs = d.imfs if channel is None else d.imfs[channel:channel + 1]
    spectra = np.abs(np.fft.rfft(imfs, axis=2))
    norms = np.linalg.norm(spectra, axis=2, keepdims=True)
    unit = np.divide(spectra, norms, out=np.zeros_like(spectra), where=norms > 0)
    overlaps = np.einsum("ckf,ckf->ck", unit[:, :-1], unit[:, 1:])
    return float(np.clip(overlaps.mean(), 0.0, 1.0))


def write_decomposition_csv(path, d: Decomposition) -> None:
    """Long-format export: ``channel,imf_index,sample_index,value``; residual has imf_index -1."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["channel", "imf_index", "sample_index", "value"])
        for c, label in enumerate(d.labels):
            for k in range(d.n_imfs):
                for t, v in enumerate(d.imfs[c, k]):
                    writer.writerow([label, k, t, format_float(v)])
            for t, v in enumerate(d.residual[c]):
                writer.writerow([label, -1, t, format_float(v)])
