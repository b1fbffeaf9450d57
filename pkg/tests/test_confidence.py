import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex import confidence
from purex.bench.checks import random_case
from purex.confidence import CaseKind, ConfidenceCase, delta_H, dkw_band, n_H
from purex.errors import ConfigError

HM = ConfidenceCase.from_name("HoeffdingMean")
KINDS = list(CaseKind)


def test_n_H_examples():
    assert n_H(HM, 0.05, 0.1) == 185 == math.ceil(50 * math.log(40))
    assert n_H(ConfidenceCase.from_name("FiniteTV", support_size=4), 0.05, 0.1) == 500
    assert n_H(ConfidenceCase.from_name("BoundedContinuousTV", C=1.0), math.exp(-1), 1.0) == 14


def test_delta_H_examples():
    assert delta_H(HM, 0.02, 1000) == pytest.approx(math.sqrt(math.log(100) / 2000), rel=1e-14)
    assert delta_H(HM, 0.02, 1000) == pytest.approx(0.04799, abs=5e-6)
    finite = delta_H(ConfidenceCase.from_name("FiniteTV", support_size=4), 0.05, 500)
    assert math.sqrt(math.log(20) / 1000) == pytest.approx(0.05473, abs=5e-6)
    assert math.sqrt(4 / 2000) == pytest.approx(0.04472, abs=5e-6)
    assert finite == pytest.approx(math.sqrt(math.log(20) / 1000) + math.sqrt(4 / 2000), rel=1e-14)
    assert finite == pytest.approx(0.05473 + 0.04472, abs=1e-5)


def test_quadrupling_n_halves_the_hoeffding_term():
    assert delta_H(HM, 0.1, 4000) == pytest.approx(delta_H(HM, 0.1, 1000) / 2, rel=1e-14)


def test_dkw_band_examples():
    assert dkw_band(2 * math.exp(-2), 1) == pytest.approx(1.0, abs=1e-15)
    assert dkw_band(0.05, 100) == pytest.approx(math.sqrt(math.log(40) / 200), rel=1e-14)
    bands = [dkw_band(0.05, n) for n in (1, 10, 100, 10**4)]
    assert bands == sorted(bands, reverse=True)


def test_missing_constant_names_the_field():
    with pytest.raises(ConfigError) as err:
        ConfidenceCase.from_name("BoundedContinuousTV")
    assert err.value.path == "case.C"


def test_racing_bound_example():
    expected = 2 * n_H(HM, 0.1 / (2 * 2 * math.log(20) ** 2), 0.05)
    assert confidence.racing_complexity_bound(HM, [0.4, 0.4], 0.1) == expected == 2632


def test_racing_bound_gap_and_delta_scaling():
    base = confidence.racing_complexity_bound(HM, [0.4, 0.4], 0.1)
    assert confidence.racing_complexity_bound(HM, [0.2, 0.2], 0.1) > 4 * base
    tighter = confidence.racing_complexity_bound(HM, [0.4, 0.4], 0.01)
    assert 0 < tighter - base <= 2 * (32 / 0.4**2 * math.log(10) + 1)


def test_lucb_bound_example_and_minimality():
    gaps = [0.4, 0.4]
    t = confidence.lucb_complexity_bound(HM, gaps, 0.1)
    assert t == 1955
    assert confidence._lucb_rhs(HM, gaps, 0.1, t) < t
    assert confidence._lucb_rhs(HM, gaps, 0.1, t - 1) >= t - 1


@pytest.mark.parametrize("bound", [confidence.racing_complexity_bound, confidence.lucb_complexity_bound])
@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_bounds_grow_with_confidence_and_shrinking_gaps(bound, kind):
    rng = np.random.default_rng(int(kind))
    for _ in range(10):
        case = random_case(rng, kind)
        gaps = rng.uniform(0.1, 1.0, size=3)
        b = bound(case, gaps, 0.1)
        assert bound(case, gaps, 0.01) >= b
        assert bound(case, gaps / 2, 0.1) >= b


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
@given(seed=st.integers(0, 2**32 - 1), delta=st.floats(1e-8, 0.9), gap=st.floats(1e-3, 2.0))
@settings(max_examples=100, deadline=None)
def test_radius_at_sufficient_count_is_within_gap(kind, seed, delta, gap):
    case = random_case(np.random.default_rng(seed), kind)
    assert delta_H(case, delta, n_H(case, delta, gap)) <= gap + 1e-12


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
@given(seed=st.integers(0, 2**32 - 1), d1=st.floats(1e-8, 0.9), d2=st.floats(1e-8, 0.9), g1=st.floats(1e-3, 2.0), g2=st.floats(1e-3, 2.0))
@settings(max_examples=100, deadline=None)
def test_n_H_nonincreasing_in_gap_and_delta(kind, seed, d1, d2, g1, g2):
    case = random_case(np.random.default_rng(seed), kind)
    dlo, dhi, glo, ghi = min(d1, d2), max(d1, d2), min(g1, g2), max(g1, g2)
    assert n_H(case, dlo, glo) >= n_H(case, dlo, ghi)
    assert n_H(case, dlo, glo) >= n_H(case, dhi, glo)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
@given(seed=st.integers(0, 2**32 - 1), delta=st.floats(1e-8, 0.9), n1=st.integers(1, 10**9), n2=st.integers(1, 10**9))
@settings(max_examples=100, deadline=None)
def test_delta_H_nonincreasing_in_n(kind, seed, delta, n1, n2):
    case = random_case(np.random.default_rng(seed), kind)
    lo, hi = min(n1, n2), max(n1, n2)
    assert delta_H(case, delta, lo) >= delta_H(case, delta, hi)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_delta_H_nondecreasing_in_inverse_delta(kind):
    rng = np.random.default_rng(11)
    deltas = [0.5, 0.1, 0.01, 1e-3, 1e-6]
    for _ in range(50):
        case = random_case(rng, kind)
        for n in (10, 100, 10**4, 10**6):
            radii = [delta_H(case, d, n) for d in deltas]
            assert radii == sorted(radii), (case, n, radii)


def test_gaussian_fit_radius_is_the_four_term_sum():
    c = ConfidenceCase.from_name("GaussianFitTV", B=1.5, C=0.25, beta=1.25, lam=1.0, sigma2_min=1.0, sigma2_max=2.0)
    delta, n = 0.01, 5000
    l4, l2 = math.log(4 / delta), math.log(2 / delta)
    lg = max(1.0, math.log(1.25 * math.sqrt(8 * n / l2)))
    want = 1.5 * (
        math.sqrt(2 * l4 / n)
        + (8 * math.sqrt(2) * 0.25 * lg * lg / n) ** (1 / 3)
        + math.sqrt(2.0 * l4 / (math.pi * n))
        + math.sqrt(4 * 4.0 * l4 / (math.pi * n))
    )
    assert delta_H(c, delta, n) == pytest.approx(want, rel=1e-14)
