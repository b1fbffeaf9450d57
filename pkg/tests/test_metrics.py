import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex import arms, metrics
from purex.errors import AlignmentError
from purex.estimation import PiecewiseDensity

pmfs = st.integers(1, 12).flatmap(
    lambda k: st.tuples(
        st.lists(st.floats(0, 1), min_size=k, max_size=k).filter(lambda v: sum(v) > 0),
        st.lists(st.floats(0, 1), min_size=k, max_size=k).filter(lambda v: sum(v) > 0),
    )
)


def _norm(v):
    a = np.asarray(v, dtype=float)
    return a / a.sum()


def test_mean_distance_examples():
    assert metrics.mean_distance(arms.bernoulli(0.7), arms.bernoulli(0.4)) == pytest.approx(0.3, abs=1e-12)
    assert metrics.mean_distance(arms.bernoulli(0.7), arms.bernoulli(0.7)) == 0.0
    assert metrics.mean_distance(arms.gaussian(1.0, 4.0), arms.gaussian(-1.0, 1.0)) == pytest.approx(2.0, abs=1e-12)


def test_ks_examples():
    assert metrics.ks_distance(arms.categorical([0], [1.0]), arms.categorical([1], [1.0])) == pytest.approx(1.0)
    assert metrics.ks_distance(arms.bernoulli(0.7), arms.bernoulli(0.7)) == 0.0
    assert metrics.ks_distance(arms.bernoulli(0.7), arms.bernoulli(0.4)) == pytest.approx(0.3, abs=1e-12)


def test_tv_discrete_examples():
    assert metrics.tv_discrete([1, 0], [0, 1]) == 1.0
    assert metrics.tv_discrete([0.2, 0.8], [0.2, 0.8]) == 0.0
    assert metrics.tv_discrete([0.7, 0.3], [0.4, 0.6]) == pytest.approx(0.3, abs=1e-12)


def test_tv_bruteforce_examples():
    assert metrics.tv_bruteforce([1, 0], [0, 1]) == 1.0
    assert metrics.tv_bruteforce([0.7, 0.3], [0.4, 0.6]) == pytest.approx(0.3, abs=1e-12)


def test_misaligned_vectors_raise():
    with pytest.raises(AlignmentError):
        metrics.tv_discrete([0.5, 0.5], [1.0])


@given(pmfs)
@settings(max_examples=300, deadline=None)
def test_tv_discrete_matches_bruteforce(pair):
    p, q = _norm(pair[0]), _norm(pair[1])
    assert abs(metrics.tv_discrete(p, q) - metrics.tv_bruteforce(p, q)) <= 1e-12


def test_tv_discrete_matches_bruteforce_on_ten_points():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p, q = rng.dirichlet(np.ones(10)), rng.dirichlet(np.ones(10))
        assert abs(metrics.tv_discrete(p, q) - metrics.tv_bruteforce(p, q)) <= 1e-12


def test_tv_continuous_examples():
    assert metrics.tv_continuous(arms.uniform(), arms.uniform()).value == pytest.approx(0.0, abs=1e-12)
    g = metrics.tv_continuous(arms.gaussian(0.0, 1.0), arms.gaussian(0.1, 1.0)).value
    assert g <= 0.1 / math.sqrt(2 * math.pi) + 1e-6
    assert 0.1 / math.sqrt(2 * math.pi) == pytest.approx(0.03989, abs=1e-5)
    step = PiecewiseDensity(0.5, np.array([1.5, 0.5]), 2)
    assert metrics.tv_continuous(step, arms.uniform()).value == pytest.approx(0.25, abs=1e-10)


@given(m1=st.floats(-3, 3), m2=st.floats(-3, 3), v1=st.floats(0.2, 5), v2=st.floats(0.2, 5))
@settings(max_examples=60, deadline=None)
def test_closed_form_gaussian_tv_matches_quadrature(m1, m2, v1, v2):
    g1, g2 = arms.gaussian(m1, v1), arms.gaussian(m2, v2)
    assert metrics.tv_gaussians(g1, g2) == pytest.approx(metrics.tv_continuous(g1, g2).value, abs=1e-7)


@given(pmfs)
@settings(max_examples=200, deadline=None)
def test_ks_never_exceeds_tv(pair):
    p, q = _norm(pair[0]), _norm(pair[1])
    labels = list(range(len(p)))
    a, b = arms.categorical(labels, p), arms.categorical(labels, q)
    assert metrics.ks_distance(a, b) <= metrics.tv_distance(a, b) + 1e-12


@given(pmfs)
@settings(max_examples=200, deadline=None)
def test_mean_distance_bounded_by_range_times_tv(pair):
    p, q = _norm(pair[0]), _norm(pair[1])
    labels = list(np.linspace(0.0, 1.0, len(p)))
    a, b = arms.categorical(labels, p), arms.categorical(labels, q)
    assert metrics.mean_distance(a, b) <= metrics.tv_distance(a, b) + 1e-12


@pytest.mark.parametrize("kind", list(metrics.DistanceKind))
def test_distance_axioms_on_random_triples(kind):
    rng = np.random.default_rng(3)
    labels = [0.0, 0.25, 0.5, 1.0]
    for _ in range(100):
        a, b, c = (arms.categorical(labels, rng.dirichlet(np.ones(4))) for _ in range(3))
        d = lambda x, y: metrics.distance(kind, x, y)  # noqa: E731
        assert d(a, b) >= 0
        assert d(a, b) == pytest.approx(d(b, a), abs=1e-12)
        assert d(a, a) <= 1e-12
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-12


def test_continuous_distance_axioms():
    u, p, t = arms.uniform(), arms.polynomial(1), arms.triangular(0.5)
    tv = metrics.tv_distance
    assert tv(u, p) == pytest.approx(tv(p, u), abs=1e-9)
    assert tv(u, t) <= tv(u, p) + tv(p, t) + 1e-9
