"""Signal containers and elementary transformations.

All containers are immutable: sample arrays are copied on construction and
flagged read-only, so operations can share inputs freely.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CsvParseError, InvalidArgumentError

MIN_DECOMPOSITION_LENGTH = 8


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A uniformly sampled real-valued series."""

    samples: np.ndarray
    sample_rate: float = 1.0
    label: str = ""

    def __post_init__(self):
        arr = _frozen_array(self.samples)
        if arr.ndim != 1:
            raise InvalidArgumentError(f"samples must be one-dimensional, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError(f"series {self.label!r} contains NaN or Inf")
        if not self.sample_rate > 0:
            raise InvalidArgumentError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.label == other.label
            and np.array_equal(self.samples, other.samples)
        )

    def replace(self, samples=None, sample_rate=None, label=None) -> "TimeSeries":
        return TimeSeries(
            self.samples if samples is None else samples,
            self.sample_rate if sample_rate is None else sample_rate,
            self.label if label is None else label,
        )


def as_series(x, sample_rate: float = 1.0, label: str = "") -> TimeSeries:
    """Wrap arrays as TimeSeries; TimeSeries inputs pass through unchanged."""
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(x, sample_rate, label)


@dataclass(frozen=True, eq=False)
class MultichannelSignal:
    """Equal-length channels; the first ``data_channel_count`` carry data."""

    channels: tuple
    data_channel_count: int = field(default=-1)

    def __post_init__(self):
        channels = tuple(self.channels)
        if not channels:
            raise InvalidArgumentError("a multichannel signal needs at least one channel")
        n, fs = len(channels[0]), channels[0].sample_rate
        for ch in channels[1:]:
            if len(ch) != n or ch.sample_rate != fs:
                raise InvalidArgumentError("all channels must share length and sample_rate")
        count = len(channels) if self.data_channel_count < 0 else self.data_channel_count
        if count > len(channels):
            raise InvalidArgumentError("data_channel_count exceeds the channel count")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "data_channel_count", count)

    @classmethod
    def from_array(cls, data, sample_rate: float = 1.0, labels=None, data_channel_count: int = -1):
        """Build from a (channels, samples) array."""
        data = np.asarray(data, dtype=float)
        labels = labels or [f"ch{i}" for i in range(data.shape[0])]
        return cls(tuple(TimeSeries(row, sample_rate, lab) for row, lab in zip(data, labels)), data_channel_count)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def sample_rate(self) -> float:
        return self.channels[0].sample_rate

    def __len__(self) -> int:
        return len(self.channels[0])

    def to_array(self) -> np.ndarray:
        """(channels, samples) array copy."""
        return np.stack([ch.samples for ch in self.channels])


@dataclass(frozen=True)
class WindowPlan:
    window_length: int
    hop: int
    count: int


def decimate(series: TimeSeries, factor: int) -> TimeSeries:
    """Keep every ``factor``-th sample starting at index 0.

    No anti-alias filter is applied: the down-sampling experiments are meant
    to damage the dynamics, not to band-limit them.
    """
    n = len(series)
    if int(factor) != factor or factor < 1 or factor > n:
        raise InvalidArgumentError(f"decimation factor must be an integer in [1, {n}], got {factor}")
    factor = int(factor)
    if factor == 1:
        return series
    return series.replace(samples=series.samples[::factor], sample_rate=series.sample_rate / factor)


def lag_shift(series: TimeSeries, shift: int) -> TimeSeries:
    """Crop ``series`` so that it appears delayed by ``shift`` samples.

    A positive shift drops the last ``shift`` samples (the series is then
    paired with a partner cropped at its start, see :func:`lag_shift_pair`);
    a negative shift drops the first ``|shift|`` samples.
    """
    n = len(series)
    shift = int(shift)
    if abs(shift) >= n:
        raise InvalidArgumentError(f"|shift| must be smaller than the series length {n}, got {shift}")
    if shift == 0:
        return series
    if shift > 0:
        return series.replace(samples=series.samples[: n - shift])
    return series.replace(samples=series.samples[-shift:])


def lag_shift_pair(shifted: TimeSeries, partner: TimeSeries, shift: int):
    """Delay ``shifted`` by ``shift`` samples against ``partner``; both cropped to their overlap."""
    if len(shifted) != len(partner):
        raise InvalidArgumentError("paired series must have equal length")
    a = lag_shift(shifted, shift)
    b = lag_shift(partner, -shift)
    return a, b


def segment(series: TimeSeries, window_length: int):
    """Split into non-overlapping windows; a partial trailing window is dropped.

    Returns
    -------
    (WindowPlan, list of TimeSeries)
    """
    n = len(series)
    window_length = int(window_length)
    if window_length < MIN_DECOMPOSITION_LENGTH:
        raise InvalidArgumentError(f"window_length must be >= {MIN_DECOMPOSITION_LENGTH}, got {window_length}")
    if window_length > n:
        raise InvalidArgumentError(f"window_length {window_length} exceeds series length {n}")
    count = (n - window_length) // window_length + 1
    plan = WindowPlan(window_length, window_length, count)
    windows = [
        series.replace(samples=series.samples[i * window_length:(i + 1) * window_length])
        for i in range(count)
    ]
    return plan, windows


# --- CSV ingestion -----------------------------------------------------------

def read_csv(path, sample_rate: float | None = None) -> list[TimeSeries]:
    """Read a header-labelled CSV of channels.

    An optional first column named ``time`` is not returned as a channel; its
    median spacing sets the sample rate unless ``sample_rate`` overrides it.
    Without either, the rate defaults to 1.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvParseError(f"{path}: line 1: empty file, expected a header row")
    header = [h.strip() for h in rows[0]]
    if not header or any(h == "" for h in header):
        raise CsvParseError(f"{path}: line 1: header has empty column labels")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != len(header):
            raise CsvParseError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise CsvParseError(f"{path}: line {lineno}: {exc}") from None
    if not values:
        raise CsvParseError(f"{path}: no data rows")
    data = np.array(values, dtype=float)
    if not np.all(np.isfinite(data)):
        bad = int(np.argwhere(~np.isfinite(data))[0, 0]) + 2
        raise CsvParseError(f"{path}: line {bad}: non-finite value")

    has_time = header[0].lower() == "time"
    rate = sample_rate
    if rate is None and has_time and len(data) > 1:
        spacing = float(np.median(np.diff(data[:, 0])))
        if spacing <= 0:
            raise CsvParseError(f"{path}: time column is not increasing")
        rate = 1.0 / spacing
    if rate is None:
        rate = 1.0
    start = 1 if has_time else 0
    return [TimeSeries(data[:, j], rate, header[j]) for j in range(start, len(header))]


def select_channel(channels: Sequence[TimeSeries], selector) -> TimeSeries:
    """Pick a channel by header label, or by 0-based index when ``selector`` is an int-like string."""
    labels = [ch.label for ch in channels]
    if selector in labels:
        return channels[labels.index(selector)]
    try:
        idx = int(selector)
    except (TypeError, ValueError):
        idx = None
    if idx is not None and 0 <= idx < len(channels):
        return channels[idx]
    raise InvalidArgumentError(f"no channel {selector!r}; available: {', '.join(labels)}")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, channels: Sequence[TimeSeries], include_time: bool = False) -> int:
    """Write channels in the ingestion format; returns the number of data rows."""
    n = len(channels[0])
    header = [ch.label or f"ch{i}" for i, ch in enumerate(channels)]
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow((["time"] if include_time else []) + header)
        fs = channels[0].sample_rate
        for i in range(n):
            row = [format_float(ch.samples[i]) for ch in channels]
            if include_time:
                row.insert(0, format_float(i / fs))
            writer.writerow(row)
    return n
