import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex import arms
from purex.confidence import dkw_band
from purex.errors import ConfigError

PRESET_ARMS = [
    arms.bernoulli(0.3),
    arms.categorical([0, 1, 5], [0.2, 0.5, 0.3]),
    arms.geometric(0.6),
    arms.uniform(),
    arms.triangular(0.3),
    arms.polynomial(2),
    arms.gaussian(1.0, 4.0),
    arms.laplace(0.5, 2.0),
    arms.gaussian_mixture([0.5, 0.5], [-1.0, 1.0], [0.25, 0.25]),
]


def test_point_mass_sample_repeats_its_label():
    d = arms.categorical(["a"], [1.0])
    assert list(arms.sample(d, np.random.default_rng(0), 3)) == ["a", "a", "a"]


@pytest.mark.parametrize("d", PRESET_ARMS, ids=lambda d: getattr(d, "name", type(d).__name__))
def test_zero_draws_give_an_empty_sequence(d):
    assert len(arms.sample(d, np.random.default_rng(0), 0)) == 0


def test_standard_gaussian_sample_mean():
    x = arms.sample(arms.gaussian(0.0, 1.0), np.random.default_rng(1), 10**6)
    assert abs(x.mean()) < 0.01


def test_cdf_examples():
    assert arms.cdf(arms.gaussian(0.0, 1.0), 0.0) == pytest.approx(0.5, abs=1e-15)
    assert arms.cdf(arms.uniform(), 0.25) == pytest.approx(0.25, abs=1e-15)
    assert arms.true_quantile(arms.categorical([0, 1], [0.3, 0.7]), 0.3) == 0


def test_validate_accepts_constant_density_with_zero_constant():
    assert arms.validate(arms.uniform(), C=0.0).passed


def test_validate_rejects_steep_density():
    d = arms.ContinuousBounded(lambda x: 2.0 * np.asarray(x, dtype=float), C=0.5)
    rep = arms.validate(d)
    assert not rep.passed
    assert rep.violations


def test_validate_accepts_geometric_envelope():
    q = 0.6
    assert arms.validate(arms.geometric(q), beta=1.0, lam=-math.log(q)).passed


@pytest.mark.parametrize("d", PRESET_ARMS, ids=lambda d: getattr(d, "name", type(d).__name__))
def test_total_mass_is_one(d):
    assert arms.total_mass(d) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("d", PRESET_ARMS, ids=lambda d: getattr(d, "name", type(d).__name__))
@given(tau=st.floats(0.001, 0.999))
@settings(max_examples=25, deadline=None)
def test_cdf_at_quantile_reaches_level(d, tau):
    assert arms.cdf(d, arms.true_quantile(d, tau)) >= tau - 1e-9


def test_empirical_cdf_stays_in_dkw_band():
    n, delta = 10**5, 0.01
    band = dkw_band(delta, n)
    d = arms.laplace(0.0, 1.0)
    failures = 0
    for s in range(100):
        x = np.sort(arms.sample(d, np.random.default_rng(s), n))
        F = arms.cdf(d, x)
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - F), np.max(F - (i - 1) / n))
        failures += ks > band
    assert failures / 100 <= delta


def test_random_source_streams_are_reproducible_and_distinct():
    src = arms.RandomSource(7)
    a = src.child(0).generator().random(4)
    b = arms.RandomSource(7).child(0).generator().random(4)
    c = src.child(1).generator().random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_unknown_preset_parameter_names_the_field():
    with pytest.raises(ConfigError) as err:
        arms.from_preset("bernoulli", p=1.5)
    assert err.value.path


def test_mean_and_variance_of_presets():
    assert arms.mean(arms.bernoulli(0.3)) == pytest.approx(0.3)
    assert arms.variance(arms.gaussian(1.0, 4.0)) == pytest.approx(4.0, rel=1e-8)
    assert arms.variance(arms.laplace(0.0, 1.0)) == pytest.approx(2.0, rel=1e-6)
