"""Benchmark systems: coupled logistic maps, a driven AR(2) pair, white noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, InvalidArgumentError
from .signal import TimeSeries

KINDS = ("deterministic_logistic", "stochastic_ar", "white_noise_pair")
AR_DEFAULT_BURN_IN = 100
_DIVERGENCE_BOUND = 10.0


@dataclass(frozen=True)
class SystemSpec:
    """Which system to generate and how much of it."""

    kind: str
    length: int
    seed: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown system {self.kind!r}; expected one of {KINDS}")
        if self.length < 1:
            raise InvalidArgumentError("length must be >= 1")
        if self.burn_in is not None and self.burn_in < 0:
            raise InvalidArgumentError("burn_in must be >= 0")

    def generate(self, sample_rate: float = 1.0) -> tuple:
        if self.kind == "deterministic_logistic":
            return logistic_coupled(self.length, self.burn_in or 0, sample_rate)
        if self.kind == "stochastic_ar":
            burn = AR_DEFAULT_BURN_IN if self.burn_in is None else self.burn_in
            return ar_stochastic(self.length, self.seed, burn, sample_rate)
        return white_noise_pair(self.length, self.seed, sample_rate)


def _check(length, burn_in):
    if int(length) != length or length < 1:
        raise InvalidArgumentError(f"length must be a positive integer, got {length}")
    if int(burn_in) != burn_in or burn_in < 0:
        raise InvalidArgumentError(f"burn_in must be a non-negative integer, got {burn_in}")
    return int(length), int(burn_in)


def logistic_coupled(length: int = 80, burn_in: int = 0, sample_rate: float = 1.0,
                     x0: float = 0.2, y0: float = 0.4) -> tuple:
    """Two-species logistic map where X drives Y more strongly than Y drives X.

    X(t+1) = X(t) (3.8 - 3.8 X(t) - 0.02 Y(t))
    Y(t+1) = Y(t) (3.5 - 3.5 Y(t) - 0.1 X(t))

    Raises
    ------
    DivergenceError
        If the orbit leaves [-10, 10].
    """
    length, burn_in = _check(length, burn_in)
    total = length + burn_in
    x = np.empty(total)
    y = np.empty(total)
    x[0], y[0] = x0, y0
    for t in range(total - 1):
        x[t + 1] = x[t] * (3.8 - 3.8 * x[t] - 0.02 * y[t])
        y[t + 1] = y[t] * (3.5 - 3.5 * y[t] - 0.1 * x[t])
        if abs(x[t + 1]) > _DIVERGENCE_BOUND or abs(y[t + 1]) > _DIVERGENCE_BOUND:
            raise DivergenceError(f"logistic orbit left [-10, 10] at step {t + 1}")
    return (TimeSeries(x[burn_in:], sample_rate, "X"), TimeSeries(y[burn_in:], sample_rate, "Y"))


def _streams(seed: int, count: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def ar_stochastic(length: int = 100, seed: int = 0, burn_in: int = AR_DEFAULT_BURN_IN,
                  sample_rate: float = 1.0, innovations=None, initial=None) -> tuple:
    """AR(2) oscillator X driving Y at lag 2.

    X(t+1) = 0.95 sqrt(2) X(t) - 0.9025 X(t-1) + w1(t)
    Y(t+1) = 0.5 X(t-1) + w2(t)

    Parameters
    ----------
    innovations : (2, length + burn_in) array, optional
        Replaces the seeded standard-normal ``w1``, ``w2``.
    initial : array_like of 3, optional
        (X(0), X(1), Y(1)); drawn standard-normal when omitted.
    """
    length, burn_in = _check(length, burn_in)
    total = length + burn_in
    w1_rng, w2_rng, init_rng = _streams(seed, 3)
    if innovations is None:
        w = np.stack([w1_rng.standard_normal(total), w2_rng.standard_normal(total)])
    else:
        w = np.asarray(innovations, dtype=float)
        if w.shape != (2, total):
            raise InvalidArgumentError(f"innovations must have shape (2, {total}), got {w.shape}")
    init = init_rng.standard_normal(3) if initial is None else np.asarray(initial, dtype=float)
    a1, a2 = 0.95 * np.sqrt(2.0), -0.9025
    # one extra leading sample so X(t-1) exists at the first step
    x = np.empty(total + 1)
    y = np.empty(total + 1)
    x[0], x[1], y[1] = init
    y[0] = 0.0
    for t in range(1, total):
        x[t + 1] = a1 * x[t] + a2 * x[t - 1] + w[0, t - 1]
        y[t + 1] = 0.5 * x[t - 1] + w[1, t - 1]
    x, y = x[1:], y[1:]
    return (TimeSeries(x[burn_in:], sample_rate, "X"), TimeSeries(y[burn_in:], sample_rate, "Y"))


def white_noise_pair(length: int, seed: int = 0, sample_rate: float = 1.0) -> tuple:
    """Two independent standard-normal series from separate seeded streams."""
    length, _ = _check(length, 0)
    rx, ry = _streams(seed, 2)
    return (TimeSeries(rx.standard_normal(length), sample_rate, "X"),
            TimeSeries(ry.standard_normal(length), sample_rate, "Y"))
