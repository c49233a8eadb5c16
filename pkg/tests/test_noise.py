import math

import numpy as np
import pytest
from scipy import integrate, stats

from censored_pricing.noise import (DegenerateNoise, TriangularNoise, TruncatedGaussianNoise, UniformNoise,
                                    make_noise)

from conftest import ALL_NOISE


def test_uniform_closed_form():
    n = UniformNoise(1.0)
    assert n.cdf(0.0) == 0.5
    assert n.int_cdf(0.0) == 0.25


def test_triangular_cdf_at_half():
    # 1 - (1 - 0.5)^2 / 2
    assert TriangularNoise(1.0).cdf(0.5) == pytest.approx(0.875, abs=1e-15)


@pytest.mark.parametrize("noise", ALL_NOISE, ids=lambda n: f"{n.kind}-{n.c}")
def test_int_cdf_at_c_equals_c(noise):
    assert abs(noise.int_cdf(noise.c) - noise.c) <= 1e-9


@pytest.mark.parametrize("noise", ALL_NOISE, ids=lambda n: f"{n.kind}-{n.c}")
def test_tails(noise):
    c = noise.c
    assert noise.cdf(-c) == 0.0 and noise.cdf(-c - 3) == 0.0
    assert noise.cdf(c) == 1.0 and noise.cdf(c + 3) == 1.0
    assert noise.int_cdf(-c - 1) == 0.0
    assert noise.int_cdf(c + 2.5) == pytest.approx(noise.int_cdf(c) + 2.5, abs=1e-12)
    xs = np.linspace(-2 * c, 2 * c, 2001)
    assert np.all(np.diff(noise.cdf(xs)) >= 0)


def test_int_cdf_matches_quadrature(lipschitz_noise):
    n = lipschitz_noise
    for x in np.linspace(-1.2, 1.2, 13):
        val, _ = integrate.quad(lambda w: float(n.cdf(w)), -n.c - 1, x, points=[-n.c, 0.0, n.c], limit=200)
        assert n.int_cdf(x) == pytest.approx(val, abs=1e-9)


def test_derivative_of_int_cdf_is_cdf(lipschitz_noise):
    n = lipschitz_noise
    h = 1e-6
    xs = np.linspace(-1.5 * n.c, 1.5 * n.c, 1000)
    fd = (n.int_cdf(xs + h) - n.int_cdf(xs - h)) / (2 * h)
    assert np.max(np.abs(fd - n.cdf(xs))) <= 1e-6


def test_lipschitz_constant_bounds_slopes(lipschitz_noise):
    n = lipschitz_noise
    xs = np.linspace(-n.c, n.c, 20001)
    slopes = np.abs(np.diff(n.cdf(xs)) / np.diff(xs))
    assert slopes.max() <= n.lipschitz * (1 + 1e-6)
    assert slopes.max() >= 0.99 * n.lipschitz


def test_lipschitz_values():
    assert UniformNoise(1.0).lipschitz == 0.5
    assert TriangularNoise(2.0).lipschitz == 0.5
    g = TruncatedGaussianNoise(1.0, sigma=0.5)
    mass = stats.norm.cdf(2) - stats.norm.cdf(-2)
    assert g.lipschitz == pytest.approx(stats.norm.pdf(0) / 0.5 / mass)
    assert math.isinf(DegenerateNoise(1.0).lipschitz)


def test_samples_match_cdf(lipschitz_noise):
    n = lipschitz_noise
    x = n.sample(np.random.default_rng(11), 1_000_000)
    assert x.min() >= -n.c and x.max() <= n.c
    ks = stats.kstest(x, lambda v: n.cdf(v)).statistic
    assert ks < 0.005
    assert abs(x.mean()) <= 3 * n.c / math.sqrt(1_000_000)


def test_truncated_gaussian_matches_scipy():
    n = TruncatedGaussianNoise(1.0, sigma=0.7)
    ref = stats.truncnorm(-1 / 0.7, 1 / 0.7, scale=0.7)
    xs = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(n.cdf(xs), ref.cdf(xs), atol=1e-12)
    assert ref.mean() == pytest.approx(0.0, abs=1e-15)


def test_factory():
    assert isinstance(make_noise("uniform", 1.0), UniformNoise)
    assert make_noise("truncated-gaussian", 2.0, sigma=0.3).sigma == 0.3
    assert make_noise("truncated-gaussian", 2.0).sigma == 1.0
    with pytest.raises(ValueError):
        make_noise("cauchy", 1.0)
    with pytest.raises(ValueError):
        UniformNoise(0.0)
