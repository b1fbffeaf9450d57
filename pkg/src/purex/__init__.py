"""Best-arm identification when the reward is a functional of the whole arm distribution."""

from purex import arms, confidence, estimation, metrics, rewards
from purex.confidence import ConfidenceCase, delta_H, lucb_complexity_bound, n_H, racing_complexity_bound
from purex.explorer import Problem, RunResult, lucb, racing
from purex.rewards import RewardSpec

__version__ = "0.1.0"

__all__ = [
    "ConfidenceCase",
    "Problem",
    "RewardSpec",
    "RunResult",
    "arms",
    "confidence",
    "delta_H",
    "estimation",
    "lucb",
    "lucb_complexity_bound",
    "metrics",
    "n_H",
    "racing",
    "racing_complexity_bound",
    "rewards",
]
