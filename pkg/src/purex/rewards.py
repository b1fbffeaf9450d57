"""Reward functionals of a whole distribution.

A :class:`RewardSpec` is one of:

* ``Mean``: the expected value.
* ``Quantile(tau)``: the tau-quantile, handled through a direct confidence
  interval rather than a Lipschitz radius.
* ``NegDistanceToTarget(G, distance)``: ``-Lambda(D, G)`` for a fixed
  target ``G``.
* ``NegTVToFittedGaussian(s2_min, s2_max)``: minus the total variation
  between ``D`` and the Gaussian with ``D``'s mean and (clamped) variance.

``B`` is the Lipschitz constant of the reward in the case's distance. For
a negative distance under that same distance the triangle inequality
gives ``B = 1``, which is the default.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from purex import arms, metrics
from purex.confidence import CaseKind, ConfidenceCase, dkw_band
from purex.errors import ConfigError, InsufficientDataError
from purex.estimation import (
    EST_BOUNDED,
    EST_COUNTABLE,
    EST_FINITE,
    EST_RAW,
    EST_UNBOUNDED,
    EmpiricalPmf,
    ObservationStore,
    _as_array,
    sample_moments,
    unbounded_density,
)
from purex.metrics import DistanceKind


class RewardKind(enum.Enum):
    MEAN = "Mean"
    QUANTILE = "Quantile"
    NEG_DISTANCE = "NegDistanceToTarget"
    NEG_TV_FITTED_GAUSSIAN = "NegTVToFittedGaussian"


@dataclass(frozen=True, eq=False)
class RewardSpec:
    """A reward functional together with its Lipschitz constant.

    Use the classmethod constructors rather than filling fields by hand.
    """

    kind: RewardKind
    B: float = 1.0
    tau: Optional[float] = None
    target: Optional[arms.ArmDistribution] = None
    distance: Optional[DistanceKind] = None
    sigma2_min: Optional[float] = None
    sigma2_max: Optional[float] = None

    def __post_init__(self):
        if not (self.B > 0 and math.isfinite(self.B)):
            raise ConfigError("B must be positive", "reward.B")
        if self.kind is RewardKind.QUANTILE and not (self.tau is not None and 0.0 < self.tau < 1.0):
            raise ConfigError("tau must lie in (0, 1)", "reward.tau")
        if self.kind is RewardKind.NEG_DISTANCE and (self.target is None or self.distance is None):
            raise ConfigError("a distance reward needs a target and a distance", "reward.target")
        if self.kind is RewardKind.NEG_TV_FITTED_GAUSSIAN:
            lo, hi = self.sigma2_min, self.sigma2_max
            if lo is None or hi is None or not (0 < lo <= hi):
                raise ConfigError("need 0 < sigma2_min <= sigma2_max", "reward.sigma2_min")

    @classmethod
    def mean(cls, B: float = 1.0) -> "RewardSpec":
        return cls(RewardKind.MEAN, B=B)

    @classmethod
    def quantile(cls, tau: float) -> "RewardSpec":
        return cls(RewardKind.QUANTILE, tau=float(tau))

    @classmethod
    def neg_distance(cls, target, distance="TotalVariation", B: float = 1.0) -> "RewardSpec":
        if isinstance(distance, str):
            distance = DistanceKind.parse(distance)
        return cls(RewardKind.NEG_DISTANCE, B=B, target=target, distance=distance)

    @classmethod
    def neg_tv_fitted_gaussian(cls, sigma2_min: float, sigma2_max: float, B: float = 1.0) -> "RewardSpec":
        return cls(RewardKind.NEG_TV_FITTED_GAUSSIAN, B=B, sigma2_min=float(sigma2_min), sigma2_max=float(sigma2_max))

    @property
    def uses_intervals(self) -> bool:
        return self.kind is RewardKind.QUANTILE

    @property
    def mean_like(self) -> bool:
        return self.kind is RewardKind.MEAN or (
            self.kind is RewardKind.NEG_DISTANCE and self.distance is DistanceKind.MEAN
        )

    def clamp_variance(self, v: float) -> float:
        return min(max(v, self.sigma2_min), self.sigma2_max)

    def describe(self) -> str:
        if self.kind is RewardKind.QUANTILE:
            return f"Quantile({self.tau:g})"
        if self.kind is RewardKind.NEG_DISTANCE:
            return f"NegDistanceToTarget({getattr(self.target, 'name', 'target')}, {self.distance.value})"
        if self.kind is RewardKind.NEG_TV_FITTED_GAUSSIAN:
            return f"NegTVToFittedGaussian({self.sigma2_min:g}, {self.sigma2_max:g})"
        return "Mean"


# compatibility ----------------------------------------------------------------------

_TV_CASES = {CaseKind.FINITE_TV, CaseKind.COUNTABLE_TV, CaseKind.BOUNDED_CONTINUOUS_TV, CaseKind.UNBOUNDED_CONTINUOUS_TV}
_MEAN_CASES = {CaseKind.HOEFFDING_MEAN, CaseKind.FINITE_TV, CaseKind.BOUNDED_CONTINUOUS_TV}

ESTIMATOR_FOR_CASE = {
    CaseKind.HOEFFDING_MEAN: EST_RAW,
    CaseKind.HOEFFDING_KS: EST_RAW,
    CaseKind.FINITE_TV: EST_FINITE,
    CaseKind.COUNTABLE_TV: EST_COUNTABLE,
    CaseKind.BOUNDED_CONTINUOUS_TV: EST_BOUNDED,
    CaseKind.UNBOUNDED_CONTINUOUS_TV: EST_UNBOUNDED,
    CaseKind.GAUSSIAN_FIT_TV: EST_UNBOUNDED,
}


def check_compatible(reward: RewardSpec, case: ConfidenceCase) -> None:
    """Raise :class:`ConfigError` unless the case's analysis covers the reward."""
    k = case.kind
    if reward.kind is RewardKind.QUANTILE:
        return
    if reward.mean_like:
        ok = k in _MEAN_CASES
    elif reward.kind is RewardKind.NEG_DISTANCE and reward.distance is DistanceKind.KOLMOGOROV_SMIRNOV:
        ok = k is CaseKind.HOEFFDING_KS or k in _TV_CASES
    elif reward.kind is RewardKind.NEG_DISTANCE:
        ok = k in _TV_CASES
    else:
        ok = k is CaseKind.GAUSSIAN_FIT_TV
    if not ok:
        raise ConfigError(f"reward {reward.describe()} is not covered by case {case.name}", "case.kind")


# evaluation ---------------------------------------------------------------------------


def empirical_quantile(sorted_values: np.ndarray, q: float) -> float:
    """``inf{x : F_n(x) >= q}`` for ``q`` in ``(0, 1]``; ``q <= 0`` gives the minimum."""
    n = sorted_values.size
    if q <= 0.0:
        return float(sorted_values[0])
    k = math.ceil(q * n - 1e-9)
    return float(sorted_values[min(max(k, 1), n) - 1])


def _fitted(reward: RewardSpec, mu: float, var: float) -> arms.Gaussian:
    if not math.isfinite(var):
        # a single observation carries no spread information
        var = reward.sigma2_max
    return arms.Gaussian(mu, float(reward.clamp_variance(var)))


def eval(reward: RewardSpec, dist, moments: Optional[tuple] = None) -> float:
    """Reward of an exact distribution or an estimate.

    Args:
        reward: The reward.
        dist: An arm distribution or an estimated distribution.
        moments: ``(mean, variance)`` for the fitted Gaussian; defaults to
            the moments of ``dist`` itself.

    Examples:
        >>> eval(RewardSpec.mean(), arms.bernoulli(0.3))
        0.3
    """
    if reward.kind is RewardKind.MEAN:
        return metrics.dist_mean(dist)
    if reward.kind is RewardKind.QUANTILE:
        if isinstance(dist, EmpiricalPmf):
            cum = np.cumsum(dist.probs)
            i = int(np.searchsorted(cum, reward.tau - 1e-12, side="left"))
            return float(dist.support[min(i, dist.support.size - 1)])
        return arms.true_quantile(dist, reward.tau)
    if reward.kind is RewardKind.NEG_DISTANCE:
        return 0.0 - metrics.distance(reward.distance, dist, reward.target)
    if moments is None:
        if isinstance(dist, (EmpiricalPmf,)) or metrics.is_discrete(dist):
            raise ConfigError("the fitted-Gaussian reward needs a density", "reward.kind")
        if isinstance(dist, (arms.Gaussian, arms.ContinuousUnbounded, arms.ContinuousBounded)):
            moments = (arms.mean(dist), arms.variance(dist))
        else:
            raise ConfigError("pass the sample moments for an estimated density", "reward.kind")
    g = _fitted(reward, *moments)
    return 0.0 - metrics.tv_distance(dist, g)


def quantile_ci(O, tau: float, delta: float) -> tuple[float, float]:
    """Distribution-free interval for the tau-quantile from the DKW band.

    Returns the empirical ``(tau - eps)`` and ``(tau + eps)`` quantiles with
    ``eps = dkw_band(delta, |O|)``; levels past 0 or 1 clamp to the smallest
    or largest observation.

    Examples:
        >>> quantile_ci([1, 2, 3], 0.5, 0.5)
        (1.0, 3.0)
    """
    arr = np.sort(_as_array(O))
    return _quantile_ci_sorted(arr, tau, delta)


def _quantile_ci_sorted(arr, tau, delta, open_ends=False):
    eps = dkw_band(delta, arr.size)
    if open_ends and tau - eps <= 0.0:
        # no observation bounds the quantile from below at this level
        lo = -math.inf
    else:
        lo = empirical_quantile(arr, tau - eps)
    if open_ends and tau + eps > 1.0:
        hi = math.inf
    else:
        hi = float(arr[-1]) if tau + eps >= 1.0 else empirical_quantile(arr, tau + eps)
    return lo, hi


def fit_gaussian(O, sigma2_min: float, sigma2_max: float) -> arms.Gaussian:
    """Gaussian with the sample mean and the unbiased sample variance clamped to the bounds.

    Raises:
        InsufficientDataError: with fewer than two observations.
    """
    mu, var = sample_moments(O)
    return arms.Gaussian(mu, float(min(max(var, sigma2_min), sigma2_max)))


def eval_gaussian_fit_reward(O, C: float, beta: float, lam: float, delta: float, sigma2_min: float, sigma2_max: float) -> float:
    """Minus the TV between the tailed histogram of ``O`` and the Gaussian fitted to ``O``."""
    g = fit_gaussian(O, sigma2_min, sigma2_max)
    est = unbounded_density(O, C, beta, lam, delta)
    return -metrics.tv_to_gaussian(est, g)


# framework-facing evaluation ----------------------------------------------------------


def store_for(reward: RewardSpec, case: ConfidenceCase, support=None, keep_raw: bool = True) -> ObservationStore:
    """An empty observation store configured for the case's estimator."""
    kind = EST_RAW if reward.uses_intervals else ESTIMATOR_FOR_CASE[case.kind]
    if kind == EST_FINITE and support is None:
        raise ConfigError("the finite-support case needs the support values", "case.support_size")
    return ObservationStore(
        kind,
        support=support,
        C=case.C or 0.0,
        beta=case.beta or 0.0,
        lam=case.lam or 0.0,
        keep_raw=keep_raw or kind == EST_RAW,
    )


def estimate_from_store(reward: RewardSpec, store: ObservationStore, delta: float) -> float:
    """Point estimate of the reward from a store at confidence level ``delta``.

    The store is re-keyed first if the level or sample size calls for a new
    bin layout.
    """
    if store.n == 0:
        raise InsufficientDataError("no observations yet")
    if reward.kind is RewardKind.QUANTILE:
        return empirical_quantile(np.sort(store.values), reward.tau)
    if reward.mean_like and store.kind == EST_RAW:
        mu = store.moments()[0]
        if reward.kind is RewardKind.MEAN:
            return mu
        return -abs(mu - metrics.dist_mean(reward.target))
    est = store.estimate(delta)
    if reward.kind is RewardKind.NEG_TV_FITTED_GAUSSIAN:
        return 0.0 - metrics.tv_to_gaussian(est, _fitted(reward, *store.moments()))
    return eval(reward, est)


def interval_from_store(reward: RewardSpec, store: ObservationStore, delta: float) -> tuple[float, float]:
    """Interval the frameworks compare; unlike :func:`quantile_ci` it is unbounded
    on a side where ``tau -/+ eps`` leaves ``(0, 1]``, so it keeps its coverage at
    small sample sizes."""
    return _quantile_ci_sorted(np.sort(store.values), reward.tau, delta, open_ends=True)


def estimate_from_observations(reward: RewardSpec, case: ConfidenceCase, O, delta: float = 0.5, support=None) -> float:
    """One-shot estimate; see :func:`purex.estimation.estimate_reward`."""
    check_compatible(reward, case)
    arr = _as_array(O)
    if case.kind is CaseKind.FINITE_TV and support is None:
        sup = set(np.unique(arr).tolist())
        if reward.target is not None and metrics.is_discrete(reward.target):
            sup |= {float(k) for k in metrics._mapping(reward.target)}
        support = sorted(sup)
    store = store_for(reward, case, support)
    store.extend(arr)
    return estimate_from_store(reward, store, delta)
