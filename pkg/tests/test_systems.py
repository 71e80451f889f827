import numpy as np
import pytest
from hypothesis import given, strategies as st

from nacausal.errors import DivergenceError, InvalidArgumentError
from nacausal.systems import SystemSpec, ar_stochastic, logistic_coupled, white_noise_pair


def test_logistic_first_iterate():
    x, y = logistic_coupled(2)
    assert abs(x.samples[1] - 0.6064) <= 1e-15
    assert abs(y.samples[1] - 0.832) <= 1e-15


def test_logistic_default_length_and_bounds():
    assert len(logistic_coupled()[0]) == 80
    x, y = logistic_coupled(1000)
    assert np.all((x.samples > 0) & (x.samples < 1)) and np.all((y.samples > 0) & (y.samples < 1))


def test_logistic_burn_in_drops_prefix():
    full = logistic_coupled(50)[0].samples
    assert np.array_equal(logistic_coupled(40, 10)[0].samples, full[10:])


def test_logistic_divergence():
    with pytest.raises(DivergenceError):
        logistic_coupled(50, x0=2.0)


def test_ar_zero_innovations_give_zero():
    x, y = ar_stochastic(50, burn_in=0, innovations=np.zeros((2, 50)), initial=np.zeros(3))
    assert not np.any(x.samples) and not np.any(y.samples)


def test_ar_recursion_oracle():
    g = np.random.default_rng(0)
    w = g.standard_normal((2, 30))
    x, y = ar_stochastic(30, burn_in=0, innovations=w, initial=[0.1, -0.2, 0.3])
    xs, ys = x.samples, y.samples
    assert (xs[0], ys[0]) == (-0.2, 0.3)
    for t in range(2, 30):
        assert xs[t] == pytest.approx(0.95 * np.sqrt(2) * xs[t - 1] - 0.9025 * xs[t - 2] + w[0, t - 1], abs=1e-12)
        assert ys[t] == pytest.approx(0.5 * xs[t - 2] + w[1, t - 1], abs=1e-12)


def test_ar_default_length_and_reproducible():
    a, b = ar_stochastic(seed=1), ar_stochastic(seed=1)
    assert len(a[0]) == 100 and a[0] == b[0] and a[1] == b[1]


def test_ar_cross_correlation_points_from_x_to_y():
    x, y = (s.samples for s in ar_stochastic(2000, 5))
    forward = np.corrcoef(x[:-1], y[1:])[0, 1]
    backward = np.corrcoef(y[:-1], x[1:])[0, 1]
    assert forward > backward


def test_ar_is_stationary():
    x = ar_stochastic(2000, 9)[0].samples
    v1, v2 = x[:1000].var(), x[1000:].var()
    assert 0.5 < v2 / v1 < 2


def test_innovation_streams_are_independent():
    from nacausal.systems import _streams

    a, b = _streams(11, 2)
    assert abs(np.corrcoef(a.standard_normal(100_000), b.standard_normal(100_000))[0, 1]) < 0.01


def test_white_noise_pair_properties():
    x, y = white_noise_pair(100_000, 3)
    assert abs(np.corrcoef(x.samples, y.samples)[0, 1]) < 0.01
    assert white_noise_pair(10, 7)[0] == white_noise_pair(10, 7)[0]
    assert len(white_noise_pair(10, 0)[1]) == 10


@given(st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_generators_respect_length(n, seed):
    for kind in ("deterministic_logistic", "stochastic_ar", "white_noise_pair"):
        x, y = SystemSpec(kind, n, seed).generate()
        assert len(x) == len(y) == n


def test_spec_validation():
    with pytest.raises(InvalidArgumentError):
        SystemSpec("lorenz", 10)
    with pytest.raises(InvalidArgumentError):
        SystemSpec("white_noise_pair", 0)
    with pytest.raises(InvalidArgumentError):
        ar_stochastic(10, burn_in=-1)
