"""Sample-size and radius formulas for every supported estimation case.

Each case pairs ``n_H(delta, gap)``, the number of i.i.d. observations
after which the estimated reward is within ``gap`` of the truth with
probability at least ``1 - delta``, with ``delta_H(delta, n)``, the radius
achieved from ``n`` observations at the same level. All logarithms are
natural.

The scalar kernels are compiled with numba so the accelerated LUCB loop
can call them directly; Python callers go through :func:`n_H` and
:func:`delta_H`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from purex.errors import ConfigError, ConvergenceError


class CaseKind(enum.IntEnum):
    HOEFFDING_MEAN = 0
    HOEFFDING_KS = 1
    FINITE_TV = 2
    COUNTABLE_TV = 3
    BOUNDED_CONTINUOUS_TV = 4
    UNBOUNDED_CONTINUOUS_TV = 5
    GAUSSIAN_FIT_TV = 6


CASE_NAMES = {
    "HoeffdingMean": CaseKind.HOEFFDING_MEAN,
    "HoeffdingKS": CaseKind.HOEFFDING_KS,
    "FiniteTV": CaseKind.FINITE_TV,
    "CountableTV": CaseKind.COUNTABLE_TV,
    "BoundedContinuousTV": CaseKind.BOUNDED_CONTINUOUS_TV,
    "UnboundedContinuousTV": CaseKind.UNBOUNDED_CONTINUOUS_TV,
    "GaussianFitTV": CaseKind.GAUSSIAN_FIT_TV,
}

_REQUIRED = {
    CaseKind.HOEFFDING_MEAN: (),
    CaseKind.HOEFFDING_KS: (),
    CaseKind.FINITE_TV: ("support_size",),
    CaseKind.COUNTABLE_TV: ("beta", "lam"),
    CaseKind.BOUNDED_CONTINUOUS_TV: ("C",),
    CaseKind.UNBOUNDED_CONTINUOUS_TV: ("C", "beta", "lam"),
    CaseKind.GAUSSIAN_FIT_TV: ("C", "beta", "lam", "sigma2_min", "sigma2_max"),
}

# slots of the packed parameter vector shared with compiled code
P_B, P_S, P_C, P_BETA, P_LAM, P_S2MIN, P_S2MAX = range(7)


@dataclass(frozen=True)
class ConfidenceCase:
    """One analysed estimation case together with its constants.

    Attributes:
        kind: Which case the formulas come from.
        B: Lipschitz constant of the reward with respect to the case's
            distance.
        support_size: ``|S|`` for the finite discrete case.
        C: Lipschitz constant of the densities (``|d(x)-d(y)| <= 2C|x-y|``).
        beta: Tail envelope scale.
        lam: Tail envelope rate.
        sigma2_min: Lower bound on the arm variances.
        sigma2_max: Upper bound on the arm variances.
    """

    kind: CaseKind
    B: float = 1.0
    support_size: int | None = None
    C: float | None = None
    beta: float | None = None
    lam: float | None = None
    sigma2_min: float | None = None
    sigma2_max: float | None = None
    params: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = CaseKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not (self.B > 0 and math.isfinite(self.B)):
            raise ConfigError("B must be positive and finite", "case.B")
        for name in _REQUIRED[kind]:
            v = getattr(self, name)
            if v is None:
                raise ConfigError(f"{kind.name} needs {name}", f"case.{name}")
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive and finite", f"case.{name}")
        if kind == CaseKind.GAUSSIAN_FIT_TV and self.sigma2_min > self.sigma2_max:
            raise ConfigError("sigma2_min exceeds sigma2_max", "case.sigma2_min")
        p = np.array(
            [
                self.B,
                float(self.support_size or 0),
                self.C or 0.0,
                self.beta or 0.0,
                self.lam or 0.0,
                self.sigma2_min or 0.0,
                self.sigma2_max or 0.0,
            ]
        )
        object.__setattr__(self, "params", p)

    @classmethod
    def from_name(cls, name: str, **constants) -> "ConfidenceCase":
        if name not in CASE_NAMES:
            raise ConfigError(f"unknown case {name!r}; choose from {sorted(CASE_NAMES)}", "case.kind")
        return cls(CASE_NAMES[name], **constants)

    @property
    def name(self) -> str:
        return next(k for k, v in CASE_NAMES.items() if v == self.kind)

    def n_H(self, delta: float, gap: float) -> int:
        return n_H(self, delta, gap)

    def delta_H(self, delta: float, n: int) -> float:
        return delta_H(self, delta, n)


@njit(cache=True)
def _log_at_least_one(x):
    # log clamped so that arguments below e count as e
    if x < math.e:
        return 1.0
    return math.log(x)


@njit(cache=True)
def radius_kernel(kind, p, delta, n):
    """Radius ``delta_H`` for case ``kind`` with packed constants ``p``."""
    B = p[0]
    n = float(n)
    if kind == 0 or kind == 1:
        return B * math.sqrt(math.log(2.0 / delta) / (2.0 * n))
    if kind == 2:
        return B * math.sqrt(math.log(1.0 / delta) / (2.0 * n)) + B * math.sqrt(p[1] / (4.0 * n))
    if kind == 3:
        beta, lam = p[3], p[4]
        q = 1.0 - math.exp(-lam)
        t1 = 2.0 * B * math.sqrt(2.0 * math.log(1.0 / delta) / n)
        t2 = B * math.sqrt(2.0 / (lam * n) * _log_at_least_one(2.0 * beta * beta * lam * n / (q * q)))
        return t1 + t2
    if kind == 4:
        C = p[2]
        return B * math.sqrt(math.log(1.0 / delta) / (2.0 * n)) + B * (math.sqrt(2.0) * C / n) ** (1.0 / 3.0)
    if kind == 5:
        C, beta, lam = p[2], p[3], p[4]
        l1 = math.log(1.0 / delta)
        lg = _log_at_least_one(beta / lam * math.sqrt(8.0 * n / l1))
        t1 = B * math.sqrt(2.0 * l1 / n)
        t2 = B * (8.0 * math.sqrt(2.0) * C * lg * lg / (n * lam * lam)) ** (1.0 / 3.0)
        return t1 + t2
    # Gaussian fit
    C, beta, lam, s2min, s2max = p[2], p[3], p[4], p[5], p[6]
    l4 = math.log(4.0 / delta)
    l2 = math.log(2.0 / delta)
    lg = _log_at_least_one(beta / lam * math.sqrt(8.0 * n / l2))
    t1 = math.sqrt(2.0 * l4 / n)
    t2 = (8.0 * math.sqrt(2.0) * C * lg * lg / (n * lam * lam)) ** (1.0 / 3.0)
    t3 = math.sqrt(s2max * l4 / (math.pi * n))
    t4 = math.sqrt(4.0 * s2max * s2max * l4 / (math.pi * s2min * s2min * n))
    return B * (t1 + t2 + t3 + t4)


@njit(cache=True)
def count_kernel(kind, p, delta, gap):
    """Real-valued ``n_H`` before the ceiling."""
    B = p[0]
    if kind == 0 or kind == 1:
        return B * B / (2.0 * gap * gap) * math.log(2.0 / delta)
    if kind == 2:
        return B * B / (gap * gap) * (math.log(1.0 / delta) + p[1] / 2.0)
    if kind == 3:
        beta, lam = p[3], p[4]
        q = 1.0 - math.exp(-lam)
        g2 = gap * gap
        a = 32.0 * B * B * math.log(1.0 / delta) / g2
        b = 16.0 * B * B / (lam * g2) * _log_at_least_one(16.0 * B * B * beta * beta * lam / (q * q * g2))
        return a + b
    if kind == 4:
        C = p[2]
        return 2.0 * B * B * math.log(1.0 / delta) / gap**2 + 8.0 * math.sqrt(2.0) * B**3 * C / gap**3
    if kind == 5:
        C, beta, lam = p[2], p[3], p[4]
        lg = _log_at_least_one(1024.0 * beta * beta * B**3 * C / (lam**4 * gap**3))
        return 8.0 * B * B * math.log(1.0 / delta) / gap**2 + 128.0 * B**3 * C / (lam * lam * gap**3) * lg * lg
    # Gaussian fit, with gap measured in units of B
    C, beta, lam, s2min, s2max = p[2], p[3], p[4], p[5], p[6]
    g = gap / B
    k = math.sqrt(2.0) + math.sqrt(s2max / math.pi) + math.sqrt(4.0 * s2max * s2max / (math.pi * s2min * s2min))
    lg = _log_at_least_one(1024.0 * beta * beta * C / (lam**4 * g**3))
    return 4.0 * math.log(4.0 / delta) / (g * g) * k * k + 128.0 * C / (lam * lam * g**3) * lg * lg


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def n_H(case: ConfidenceCase, delta: float, gap: float) -> int:
    """Observations sufficient for accuracy ``gap`` at failure probability ``delta``.

    Examples:
        >>> n_H(ConfidenceCase(CaseKind.HOEFFDING_MEAN), 0.05, 0.1)
        185
    """
    _check_delta(delta)
    if not gap > 0:
        raise ValueError("gap must be positive")
    x = count_kernel(int(case.kind), case.params, float(delta), float(gap))
    return max(1, math.ceil(x))


def delta_H(case: ConfidenceCase, delta: float, n: int) -> float:
    """Confidence radius achieved by ``n`` observations at level ``delta``."""
    _check_delta(delta)
    if n < 1:
        raise ValueError("n must be at least 1")
    return float(radius_kernel(int(case.kind), case.params, float(delta), float(n)))


def dkw_band(delta: float, n: int) -> float:
    """Half-width of the uniform empirical-cdf band at level ``delta``.

    Examples:
        >>> round(dkw_band(0.05, 100), 5)
        0.13581
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def _check_gaps(gaps):
    gaps = [float(g) for g in gaps]
    if len(gaps) < 2:
        raise ValueError("need at least two arms")
    if any(not g > 0 for g in gaps):
        raise ValueError("all gaps must be positive")
    return gaps


def racing_complexity_bound(case: ConfidenceCase, gaps, delta: float) -> int:
    """Upper bound on the total pulls of the racing framework."""
    gaps = _check_gaps(gaps)
    _check_delta(delta)
    m = len(gaps)
    return sum(n_H(case, delta / (2 * m * math.log(8.0 / g) ** 2), g / 8.0) for g in gaps)


def _lucb_rhs(case, gaps, delta, t):
    m = len(gaps)
    level = delta / (2.0 * m * float(t) * float(t))
    if level <= 0.0:
        raise ConvergenceError("confidence level underflowed")
    return sum(n_H(case, level, g / 4.0) for g in gaps)


def lucb_complexity_bound(case: ConfidenceCase, gaps, delta: float, cap: int = 2**63) -> int:
    """Smallest ``t`` with ``t > sum_i n_H(delta / (2 m t^2), gap_i / 4)``.

    The right-hand side grows like ``log t`` so the search doubles ``t``
    until the inequality holds and then bisects down to the minimum.

    Raises:
        ConvergenceError: if no ``t`` below ``cap`` works.
    """
    gaps = _check_gaps(gaps)
    _check_delta(delta)
    hi = 1
    while not hi > _lucb_rhs(case, gaps, delta, hi):
        hi *= 2
        if hi > cap:
            raise ConvergenceError(f"no fixed point below {cap}")
    lo = hi // 2  # fails the inequality (or is zero)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid > _lucb_rhs(case, gaps, delta, mid):
            hi = mid
        else:
            lo = mid
    return hi
