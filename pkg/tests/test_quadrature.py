import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purex.quadrature import adaptive_simpson, integrate


def test_polynomial_is_exact():
    r = integrate(lambda x: 3 * x**2, 0.0, 2.0)
    assert r.value == pytest.approx(8.0, abs=1e-12)


def test_kink_resolved_with_breakpoint():
    r = integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, breaks=[0.3])
    assert r.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), abs=1e-12)


def test_gaussian_density_integrates_to_one():
    f = lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)  # noqa: E731
    for tol in (1e-8, 1e-11):
        r = adaptive_simpson(f, [-12.0, 0.0, 12.0], tol=tol)
        assert r.value == pytest.approx(1.0, abs=10 * tol)


@given(a=st.floats(-3, 3), w=st.floats(0.1, 4))
@settings(max_examples=30, deadline=None)
def test_sine_matches_antiderivative(a, w):
    b = a + w
    r = integrate(np.sin, a, b, pieces=4)
    assert r.value == pytest.approx(math.cos(a) - math.cos(b), abs=1e-9)
