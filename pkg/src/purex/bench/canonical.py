"""The four reference problems used by the acceptance suite and example configs."""

from __future__ import annotations

from purex import arms
from purex.confidence import ConfidenceCase
from purex.explorer.problem import Problem
from purex.rewards import RewardSpec

# uniform target on five points and three arms at TV 0.1, 0.3 and 0.5 from it
FINITE_SUPPORT = (0, 1, 2, 3, 4)
FINITE_TARGET = (0.2, 0.2, 0.2, 0.2, 0.2)
FINITE_ARMS = (
    (0.3, 0.1, 0.2, 0.2, 0.2),
    (0.5, 0.0, 0.1, 0.2, 0.2),
    (0.7, 0.0, 0.0, 0.1, 0.2),
)

# envelope constants shared by the three unbounded arms
GAUSS_FIT_C = 0.25
GAUSS_FIT_BETA = 1.25
GAUSS_FIT_LAM = 1.0
GAUSS_FIT_S2 = (1.0, 2.0)


def bernoulli_means(delta: float = 0.1, budget_cap=None) -> Problem:
    """Two Bernoulli arms with means 0.9 and 0.1 under the mean reward."""
    return Problem(
        [arms.bernoulli(0.9), arms.bernoulli(0.1)],
        RewardSpec.mean(),
        ConfidenceCase.from_name("HoeffdingMean"),
        delta,
        budget_cap,
    )


def finite_tv(delta: float = 0.1, budget_cap=None) -> Problem:
    """Three arms on five points ranked by TV to the uniform target."""
    target = arms.categorical(FINITE_SUPPORT, FINITE_TARGET)
    return Problem(
        [arms.categorical(FINITE_SUPPORT, p) for p in FINITE_ARMS],
        RewardSpec.neg_distance(target, "TotalVariation"),
        ConfidenceCase.from_name("FiniteTV", support_size=len(FINITE_SUPPORT)),
        delta,
        budget_cap,
    )


def bounded_tv(delta: float = 0.1, budget_cap=None) -> Problem:
    """Uniform against density ``2x`` on ``[0, 1]``, scored by TV to uniform."""
    return Problem(
        [arms.uniform(), arms.polynomial(1)],
        RewardSpec.neg_distance(arms.uniform(), "TotalVariation"),
        ConfidenceCase.from_name("BoundedContinuousTV", C=1.0),
        delta,
        budget_cap,
    )


def gaussian_fit(delta: float = 0.1, budget_cap=None) -> Problem:
    """N(0,1), Laplace(0,1) and an equal two-Gaussian mixture, scored by TV to their Gaussian fit."""
    s2min, s2max = GAUSS_FIT_S2
    return Problem(
        [
            arms.gaussian(0.0, 1.0),
            arms.laplace(0.0, 1.0),
            arms.gaussian_mixture([0.5, 0.5], [-1.0, 1.0], [0.25, 0.25]),
        ],
        RewardSpec.neg_tv_fitted_gaussian(s2min, s2max),
        ConfidenceCase.from_name(
            "GaussianFitTV",
            C=GAUSS_FIT_C,
            beta=GAUSS_FIT_BETA,
            lam=GAUSS_FIT_LAM,
            sigma2_min=s2min,
            sigma2_max=s2max,
        ),
        delta,
        budget_cap,
    )


CANONICAL = {
    "bernoulli_means": bernoulli_means,
    "finite_tv": finite_tv,
    "bounded_tv": bounded_tv,
    "gaussian_fit": gaussian_fit,
}
