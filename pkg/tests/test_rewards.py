import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex import arms, metrics, rewards
from purex.confidence import ConfidenceCase, delta_H, dkw_band
from purex.errors import ConfigError
from purex.rewards import RewardSpec

GFIT = ConfidenceCase.from_name("GaussianFitTV", C=0.25, beta=1.25, lam=1.0, sigma2_min=1.0, sigma2_max=2.0)


def test_exact_reward_examples():
    assert rewards.eval(RewardSpec.mean(), arms.bernoulli(0.3)) == pytest.approx(0.3)
    g = arms.categorical([0, 1, 2], [0.2, 0.5, 0.3])
    assert rewards.eval(RewardSpec.neg_distance(g), g) == 0.0
    assert rewards.eval(RewardSpec.neg_distance(arms.uniform()), arms.polynomial(1)) == pytest.approx(-0.25, abs=1e-10)


@given(st.floats(-1e6, 1e6))
@settings(max_examples=100, deadline=None)
def test_mean_of_point_mass_is_its_location(c):
    assert rewards.eval(RewardSpec.mean(), arms.categorical([c], [1.0])) == c


def test_quantile_ci_examples():
    assert rewards.quantile_ci([1, 2, 3], 0.5, 0.5) == (1.0, 3.0)
    eps = dkw_band(0.05, 100)
    assert eps == pytest.approx(0.13581, abs=5e-6)
    x = np.arange(1.0, 101.0)
    lo, hi = rewards.quantile_ci(x, 0.5, 0.05)
    assert (lo, hi) == (rewards.empirical_quantile(x, 0.5 - eps), rewards.empirical_quantile(x, 0.5 + eps))
    assert (lo, hi) == (37.0, 64.0)
    assert rewards.quantile_ci([4.2] * 30, 0.3, 0.05) == (4.2, 4.2)


def test_fit_gaussian_examples():
    g = rewards.fit_gaussian([-1.0, 1.0], 0.5, 4.0)
    assert (g.mu, g.var) == (0.0, 2.0)
    assert rewards.fit_gaussian([-1.0, 1.0], 0.5, 1.0).var == 1.0


def test_fit_gaussian_recovers_moments():
    ok = 0
    for s in range(100):
        x = 2.0 + 3.0 * np.random.default_rng(s).standard_normal(10**5)
        g = rewards.fit_gaussian(x, 1.0, 16.0)
        ok += abs(g.mu - 2.0) <= 0.1 and abs(g.var - 9.0) <= 0.5
    assert ok >= 99


def test_gaussian_fit_reward_on_gaussian_data_is_within_radius():
    ok = 0
    radius = delta_H(GFIT, 0.05, 10**5)
    for s in range(20):
        x = np.random.default_rng(s).standard_normal(10**5)
        ok += rewards.eval_gaussian_fit_reward(x, 0.25, 1.25, 1.0, 0.05, 1.0, 2.0) >= -radius
    assert ok >= 19


def test_gaussian_fit_reward_on_laplace_data():
    d = arms.laplace(0.0, 1.0)
    truth = metrics.tv_continuous(d, arms.gaussian(0.0, 2.0)).value
    x = arms.sample(d, np.random.default_rng(0), 10**5)
    v = rewards.eval_gaussian_fit_reward(x, 0.25, 1.25, 1.0, 0.05, 1.0, 2.0)
    assert v <= -truth + delta_H(GFIT, 0.05, 10**5)


def test_two_point_sample_gives_finite_value():
    assert math.isfinite(rewards.eval_gaussian_fit_reward([0.0, 5.0], 0.25, 1.25, 1.0, 0.05, 1.0, 2.0))


@given(mu=st.floats(-3, 3), mu_hat=st.floats(-3, 3), sigma=st.floats(1.0, 3.0))
@settings(max_examples=100, deadline=None)
def test_shift_bound_for_gaussians(mu, mu_hat, sigma):
    tv = metrics.tv_continuous(arms.gaussian(mu, sigma**2), arms.gaussian(mu_hat, sigma**2)).value
    assert tv <= abs(mu - mu_hat) / math.sqrt(2 * math.pi) + 1e-6


def test_shift_bound_needs_unit_scale():
    # below sigma = 1 only the scaled form |mu - mu_hat| / (sigma sqrt(2 pi)) holds
    tv = metrics.tv_gaussians(arms.gaussian(0.0, 0.01), arms.gaussian(0.1, 0.01))
    assert tv > 0.1 / math.sqrt(2 * math.pi)
    assert tv <= 0.1 / (0.1 * math.sqrt(2 * math.pi))


@given(s2min=st.floats(0.2, 3.0), ratio=st.floats(1.0, 4.0), u=st.floats(0, 1), w=st.floats(0, 1), mu=st.floats(-3, 3))
@settings(max_examples=100, deadline=None)
def test_scale_bound_for_gaussians(s2min, ratio, u, w, mu):
    s2max = s2min * ratio
    v1, v2 = s2min + u * (s2max - s2min), s2min + w * (s2max - s2min)
    tv = metrics.tv_continuous(arms.gaussian(mu, v1), arms.gaussian(mu, v2)).value
    assert tv <= abs(v1 - v2) / (math.sqrt(2 * math.pi) * s2min) + 1e-6


def test_incompatible_reward_and_case_rejected():
    with pytest.raises(ConfigError):
        rewards.check_compatible(RewardSpec.neg_tv_fitted_gaussian(1.0, 2.0), ConfidenceCase.from_name("HoeffdingMean"))
    with pytest.raises(ConfigError):
        rewards.check_compatible(RewardSpec.neg_distance(arms.uniform()), ConfidenceCase.from_name("HoeffdingMean"))
