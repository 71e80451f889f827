import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nacausal.errors import InvalidArgumentError, UndefinedPhaseError, UndefinedRatioError
from nacausal.hilbert import AnalyticSeries, EdgeTrim, analytic_signal, hilbert_energy, mean_frequency, mean_phase
from nacausal.signal import TimeSeries

FS = 1000.0
T = np.arange(1024) / FS
signals = arrays(float, st.integers(8, 200), elements=st.floats(-1e3, 1e3, allow_nan=False)).filter(
    lambda x: np.abs(x).max() > 1e-6
)


def _interior(x, frac=0.05):
    lo, hi = EdgeTrim(frac).bounds(len(x))
    return x[lo:hi]


@pytest.mark.parametrize("fn", [np.cos, np.sin])
def test_tone_frequency_and_amplitude(fn):
    a = analytic_signal(TimeSeries(fn(2 * np.pi * 10 * T), FS))
    assert np.all(np.abs(_interior(a.inst_frequency) - 10) < 0.1)
    assert np.all(np.abs(_interior(a.amplitude) - 1) < 0.01)


def test_scaling_is_linear_in_amplitude():
    x = np.cos(2 * np.pi * 10 * T)
    a, b = analytic_signal(TimeSeries(x, FS)), analytic_signal(TimeSeries(3 * x, FS))
    assert np.allclose(b.amplitude, 3 * a.amplitude, rtol=1e-12)
    assert np.allclose(b.phase, a.phase, atol=1e-12)


def test_chirp_frequency_increases():
    n = 2048
    t = np.arange(n) / FS
    span = n / FS
    x = np.cos(2 * np.pi * (5 * t + 7.5 * t**2 / span))
    f = _interior(analytic_signal(TimeSeries(x, FS)).inst_frequency)
    assert np.all(np.diff(f) > 0)
    assert np.abs(f - _interior(5 + 15 * t / span)).max() < 0.5


def test_zero_input_has_no_phase():
    with pytest.raises(UndefinedPhaseError):
        analytic_signal(np.zeros(16))
    with pytest.raises(InvalidArgumentError):
        analytic_signal(np.ones(7))


@settings(max_examples=40)
@given(signals, st.sampled_from(["mirror", "none"]))
def test_real_part_and_phase_continuity(x, boundary):
    a = analytic_signal(x, boundary)
    real = a.amplitude * np.cos(a.phase)
    assert np.abs(real - x).max() <= 1e-9 * np.abs(x).max()
    assert np.all(a.amplitude >= 0)
    steps = np.diff(a.phase)
    # differences of a cumulative sum carry rounding proportional to its size
    tol = 1e-12 * max(1.0, np.abs(a.phase).max())
    assert np.all(steps <= np.pi + tol) and np.all(steps > -np.pi - tol)


@settings(max_examples=40)
@given(signals)
def test_parseval_circular(x):
    # |z|^2 = 2|X_k|^2 for 0 < k < n/2, with DC and Nyquist counted once
    a = analytic_signal(x, "none")
    spec = np.abs(np.fft.fft(x)) ** 2
    n = len(x)
    half = spec[1:(n + 1) // 2].sum()
    ends = spec[0] + (spec[n // 2] if n % 2 == 0 else 0.0)
    expected = (ends + 4 * half) / n
    assert np.sum(a.amplitude**2) == pytest.approx(expected, rel=1e-9)


def _series(phase, amp=None, fs=1.0):
    amp = np.ones_like(phase) if amp is None else amp
    return AnalyticSeries(amp, phase, np.gradient(phase) * fs / (2 * np.pi), fs)


def test_mean_phase_examples():
    assert mean_phase(_series(np.full(50, np.pi / 4))) == pytest.approx(np.pi / 4)
    ramp = np.linspace(0, 2 * np.pi, 101)
    assert mean_phase(_series(ramp), EdgeTrim(0.0)) == pytest.approx(np.pi)


def test_mean_frequency_of_tone_and_scale_invariance():
    x = np.cos(2 * np.pi * 10 * T)
    f1 = mean_frequency(analytic_signal(TimeSeries(x, FS)))
    f2 = mean_frequency(analytic_signal(TimeSeries(7.5 * x, FS)))
    assert f1 == pytest.approx(10, rel=0.01)
    assert f2 == pytest.approx(f1, rel=1e-12)


def test_mean_frequency_zero_energy():
    with pytest.raises(UndefinedRatioError):
        mean_frequency(_series(np.zeros(20), np.zeros(20)))


def test_mean_frequency_per_tone_after_emd(two_tone):
    from nacausal.emd import emd

    _, x, fs = two_tone
    d = emd(TimeSeries(x, fs))
    freqs = [mean_frequency(analytic_signal(d.imf(0, k))) for k in range(2)]
    assert freqs[0] == pytest.approx(50, rel=0.05)
    assert freqs[1] == pytest.approx(5, rel=0.05)


def test_hilbert_energy_examples():
    x = np.cos(2 * np.pi * 10 * T)
    assert hilbert_energy((np.zeros(64), np.zeros(64))) == 0.0
    e1 = hilbert_energy((TimeSeries(x, FS), TimeSeries(x, FS)))
    e2 = hilbert_energy((TimeSeries(2 * x, FS), TimeSeries(2 * x, FS)))
    assert e2 == pytest.approx(4 * e1, rel=1e-12)


def test_hilbert_energy_ranks_faster_pair_higher():
    fast = TimeSeries(np.cos(2 * np.pi * 40 * T), FS)
    slow = TimeSeries(np.cos(2 * np.pi * 4 * T), FS)
    assert hilbert_energy((fast, fast)) > hilbert_energy((slow, slow))


def test_hilbert_energy_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        hilbert_energy((np.ones(10), np.ones(12)))


def test_edge_trim_validation():
    assert EdgeTrim().bounds(100) == (5, 95)
    with pytest.raises(InvalidArgumentError):
        EdgeTrim(0.5)
