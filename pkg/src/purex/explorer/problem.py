"""Problem definition, ground-truth gaps and run results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from purex import arms, metrics, rewards
from purex.confidence import CaseKind, ConfidenceCase, lucb_complexity_bound, racing_complexity_bound
from purex.errors import ConfigError, InvalidProblemError

TIE_TOL = 1e-9
DEFAULT_CAP_FACTOR = 10


@dataclass(frozen=True, eq=False)
class Problem:
    """A best-arm identification instance.

    Attributes:
        arms: The arm distributions (at least two).
        reward: The reward functional shared by every arm.
        case: The estimation case whose radii drive the frameworks.
        delta: Target error probability.
        budget_cap: Maximum total pulls; ``None`` picks ten times the
            framework's complexity bound.
    """

    arms: tuple
    reward: rewards.RewardSpec
    case: ConfidenceCase
    delta: float
    budget_cap: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if len(self.arms) < 2:
            raise ConfigError("need at least two arms", "arms")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)", "problem.delta")
        if self.budget_cap is not None and self.budget_cap < len(self.arms):
            raise ConfigError("budget_cap must allow one pull per arm", "problem.budget_cap")
        rewards.check_compatible(self.reward, self.case)
        if self.case.kind is CaseKind.FINITE_TV:
            sup = self.support
            if len(sup) > self.case.support_size:
                raise ConfigError(
                    f"arms and target use {len(sup)} support points but support_size is {self.case.support_size}",
                    "case.support_size",
                )

    @property
    def m(self) -> int:
        return len(self.arms)

    @cached_property
    def support(self) -> Optional[tuple]:
        """Sorted union of the numeric finite supports of the arms and the target."""
        if self.case.kind is not CaseKind.FINITE_TV:
            return None
        vals: set = set()
        items = list(self.arms)
        if self.reward.target is not None and metrics.is_discrete(self.reward.target):
            items.append(self.reward.target)
        for d in items:
            if not isinstance(d, arms.DiscreteFinite):
                raise ConfigError("the finite-support case needs finite discrete arms", "arms")
            vals |= set(float(v) for v in d.values())
        return tuple(sorted(vals))

    @cached_property
    def true_values(self) -> np.ndarray:
        """Ground-truth reward of every arm."""
        return np.array([rewards.eval(self.reward, d) for d in self.arms], dtype=float)

    @cached_property
    def best_arm(self) -> int:
        return int(np.argmax(self.true_values))

    def gaps(self) -> np.ndarray:
        """Gap of every arm to the optimum; the optimum's gap is its lead over the runner-up.

        Raises:
            InvalidProblemError: if the optimum is not unique.
        """
        return gaps_from_values(self.true_values)

    def racing_bound(self) -> int:
        return racing_complexity_bound(self.case, self.gaps(), self.delta)

    def lucb_bound(self) -> int:
        return lucb_complexity_bound(self.case, self.gaps(), self.delta)

    def cap_for(self, framework: str) -> int:
        if self.budget_cap is not None:
            return int(self.budget_cap)
        bound = self.racing_bound() if framework == "racing" else self.lucb_bound()
        return DEFAULT_CAP_FACTOR * bound

    def new_store(self):
        return rewards.store_for(self.reward, self.case, self.support)

    def new_store_lean(self):
        """A store that keeps counts and sums but no raw values."""
        return rewards.store_for(self.reward, self.case, self.support, keep_raw=False)


def gaps_from_values(values) -> np.ndarray:
    """Gaps from reward values.

    Examples:
        >>> gaps_from_values([0.9, 0.5, 0.3]).round(12).tolist()
        [0.4, 0.4, 0.6]
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise InvalidProblemError("need at least two arms")
    best = int(np.argmax(v))
    rest = np.delete(v, best)
    runner = float(rest.max())
    if v[best] - runner <= TIE_TOL:
        raise InvalidProblemError(f"optimal arm is not unique (values {v.tolist()})")
    g = v[best] - v
    g[best] = v[best] - runner
    return g


@dataclass
class RunResult:
    """Outcome of one framework run.

    Attributes:
        output_arm: Index of the arm returned.
        total_pulls: Total number of observations ``T``.
        counts: Observations per arm.
        stop_reason: ``"converged"`` or ``"budget_cap"``.
        framework: ``"racing"`` or ``"lucb"``.
        trace: Per-phase (racing) or per-step (LUCB) records, when kept.
        final_estimates: Estimates at the stopping time.
    """

    output_arm: int
    total_pulls: int
    counts: tuple
    stop_reason: str
    framework: str
    trace: list = field(default_factory=list)
    final_estimates: tuple = ()

    def __post_init__(self):
        if self.total_pulls != sum(self.counts):
            raise AssertionError("total pulls must equal the sum of per-arm counts")


def argmax_first(values) -> int:
    """Index of the maximum, lowest index on ties."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def level_at(delta: float, m: int, t: int) -> float:
    """Per-test confidence level ``delta / (2 m t^2)`` used by LUCB at time ``t``."""
    return delta / (2.0 * m * float(t) * float(t))


def is_finite(x) -> bool:
    return math.isfinite(x)
