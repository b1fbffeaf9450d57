import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex import arms, estimation, metrics, rewards
from purex.confidence import ConfidenceCase, delta_H
from purex.errors import DataError, InsufficientDataError


def _is_pow2(x):
    return math.frexp(x)[0] == 0.5


def test_empirical_pmf_counts_labels():
    pmf = estimation.empirical_pmf(["a", "a", "b"], ["a", "b", "c"])
    assert pmf.probs.tolist() == pytest.approx([2 / 3, 1 / 3, 0.0], abs=1e-15)
    assert estimation.empirical_pmf(["a"], ["a"]).probs.tolist() == [1.0]


def test_empirical_pmf_rejects_unknown_label():
    with pytest.raises(DataError):
        estimation.empirical_pmf([0, 3], [0, 1, 2])


def test_bernoulli_frequency_concentrates():
    hits = 0
    for s in range(100):
        x = arms.sample(arms.bernoulli(0.3), np.random.default_rng(s), 10**5)
        hits += abs(estimation.empirical_pmf(x, [0, 1]).probs[1] - 0.3) <= 0.01
    assert hits >= 99


def test_bounded_width_examples():
    assert estimation.bounded_width(1, 1.0) == 0.5
    assert estimation.bounded_width(10**6, 1.0) == 2.0**-6
    with pytest.raises(InsufficientDataError):
        estimation.bounded_width(0, 1.0)


def test_all_zero_observations_fill_the_first_bin():
    h = estimation.binned_density(np.zeros(50), 1.0)
    assert h.heights[0] == pytest.approx(1.0 / h.width)
    assert np.all(h.heights[1:] == 0.0)
    assert h.heights.sum() * h.width == pytest.approx(1.0, abs=1e-12)


def test_unbounded_window_example():
    assert estimation.unbounded_window(100, 1.0, 1.0, 1.0, 0.1)[0] == 4.0


def test_single_observation_hits_one_interior_bin():
    t = estimation.unbounded_density([0.0], 1.0, 1.0, 1.0, 0.1)
    assert t.left == 0.0 and t.right == 0.0
    assert np.count_nonzero(t.heights) == 1


@given(n=st.integers(1, 10**9), C=st.floats(0.01, 50))
@settings(max_examples=300, deadline=None)
def test_bin_width_stop_condition_and_lower_bound(n, C):
    ell = estimation.bounded_width(n, C)
    assert _is_pow2(ell) and ell <= 0.5
    assert math.sqrt(1.0 / (4 * n * ell)) >= C * ell / 4
    if C * C * n >= 4:
        assert ell >= (1.0 / (2 * C * C * n)) ** (1 / 3)


@given(
    n=st.integers(1, 10**9),
    C=st.floats(0.01, 20),
    beta=st.floats(0.05, 20),
    lam=st.floats(0.05, 20),
    delta=st.floats(1e-10, 0.99),
)
@settings(max_examples=300, deadline=None)
def test_window_stop_conditions_and_tail_bound(n, C, beta, lam, delta):
    L, ell = estimation.unbounded_window(n, C, beta, lam, delta)
    assert _is_pow2(L) and L >= 1 and _is_pow2(ell) and ell <= 0.5
    assert math.sqrt(math.log(1 / delta) / (2 * n)) >= 2 * beta / lam * math.exp(-lam * L)
    assert math.sqrt(L / (n * ell)) >= C * L * ell / 2
    if L > 1:
        assert L < 2 / lam * math.log(beta / lam * math.sqrt(8 * n / math.log(1 / delta)))


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=400), st.floats(0.1, 5), st.floats(0.01, 0.5))
@settings(max_examples=100, deadline=None)
def test_tailed_estimate_has_unit_mass(xs, C, delta):
    t = estimation.unbounded_density(xs, C, 1.0, 1.0, delta)
    assert t.heights.sum() * t.width + t.left + t.right == pytest.approx(1.0, abs=1e-12)
    assert np.all(t.heights >= 0)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=400), st.floats(0.1, 5))
@settings(max_examples=100, deadline=None)
def test_histogram_has_unit_mass_and_is_deterministic(xs, C):
    a = estimation.binned_density(xs, C)
    b = estimation.binned_density(list(xs), C)
    assert a.heights.sum() * a.width == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(a.heights, b.heights)


def test_laplace_estimate_within_radius():
    d = arms.laplace(0.0, 1.0)
    case = ConfidenceCase.from_name("UnboundedContinuousTV", C=d.C, beta=d.beta, lam=d.lam)
    radius = delta_H(case, 0.05, 10**5)
    ok = 0
    for s in range(20):
        x = arms.sample(d, np.random.default_rng(s), 10**5)
        est = estimation.unbounded_density(x, d.C, d.beta, d.lam, 0.05)
        ok += metrics.tv_continuous(est, d).value <= radius / case.B
    assert ok >= 19


def test_estimate_reward_examples():
    mean_case = ConfidenceCase.from_name("HoeffdingMean")
    assert estimation.estimate_reward([0, 1, 1], rewards.RewardSpec.mean(), mean_case) == pytest.approx(2 / 3)
    assert estimation.estimate_reward([1, 2, 3], rewards.RewardSpec.quantile(0.5), mean_case) == 2


def test_tv_to_uniform_estimate_is_close_to_zero():
    reward = rewards.RewardSpec.neg_distance(arms.uniform())
    case = ConfidenceCase.from_name("BoundedContinuousTV", C=1.0)
    ok = sum(
        estimation.estimate_reward(np.random.default_rng(s).random(10**5), reward, case) >= -0.05 for s in range(100)
    )
    assert ok >= 99


@pytest.mark.parametrize("name", ["finite", "bounded", "unbounded"])
def test_store_matches_one_shot_estimator(name):
    rng = np.random.default_rng(5)
    if name == "finite":
        x = rng.integers(0, 4, size=777).astype(float)
        case = ConfidenceCase.from_name("FiniteTV", support_size=4)
        reward = rewards.RewardSpec.neg_distance(arms.categorical([0, 1, 2, 3], [0.25] * 4))
        support = (0.0, 1.0, 2.0, 3.0)
    elif name == "bounded":
        x = rng.random(777)
        case = ConfidenceCase.from_name("BoundedContinuousTV", C=1.0)
        reward = rewards.RewardSpec.neg_distance(arms.uniform())
        support = None
    else:
        x = rng.standard_normal(777)
        case = ConfidenceCase.from_name("UnboundedContinuousTV", C=0.25, beta=1.25, lam=1.0)
        reward = rewards.RewardSpec.neg_distance(arms.gaussian(0.0, 1.0))
        support = None
    store = rewards.store_for(reward, case, support)
    for chunk in np.array_split(x, 7):
        store.extend(chunk)
    store.ensure_key(0.01)
    got = rewards.estimate_from_store(reward, store, 0.01)
    want = rewards.estimate_from_observations(reward, case, x, 0.01, support)
    assert got == pytest.approx(want, abs=1e-12)
