"""Seeded replications of one framework on one problem."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from purex.bench.config import ExperimentConfig
from purex.explorer import lucb, racing
from purex.explorer.problem import Problem, RunResult


def replication_seed(base: int, r: int) -> int:
    """64-bit seed of replication ``r`` mixed from the base seed.

    Examples:
        >>> replication_seed(0, 0) == replication_seed(0, 0)
        True
        >>> replication_seed(0, 0) != replication_seed(0, 1)
        True
    """
    ss = np.random.SeedSequence([int(base), int(r)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class Replication:
    """Outcome of one replication; ``result`` is None if it raised."""

    index: int
    seed: int
    result: Optional[RunResult]
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.result is None


@dataclass
class RunOutcome:
    """All replications of an experiment in index order."""

    framework: str
    problem: Problem
    base_seed: int
    replications: list = field(default_factory=list)


def run_one(problem: Problem, framework: str, seed: int, lucb_refresh_growth: float = 0.0) -> RunResult:
    if framework == "racing":
        return racing(problem, seed, keep_trace=False)
    if framework == "lucb":
        return lucb(problem, seed, refresh_growth=lucb_refresh_growth)
    raise ValueError(f"unknown framework {framework!r}")


def run(cfg: ExperimentConfig, seed: Optional[int] = None, reps: Optional[int] = None, progress=None) -> RunOutcome:
    """Run every replication of ``cfg`` in order.

    A replication that raises is recorded with its message and the run
    continues.

    Args:
        cfg: The experiment.
        seed: Override of the base seed.
        reps: Override of the replication count.
        progress: Optional callable invoked with each finished
            :class:`Replication`.
    """
    base = cfg.seed if seed is None else int(seed)
    count = cfg.replications if reps is None else int(reps)
    if count < 1:
        raise ValueError("need at least one replication")
    out = RunOutcome(cfg.framework, cfg.problem, base)
    for r in range(count):
        s = replication_seed(base, r)
        try:
            res = run_one(cfg.problem, cfg.framework, s, cfg.lucb_refresh_growth)
            rep = Replication(r, s, res)
        except (ArithmeticError, ValueError, MemoryError) as exc:
            rep = Replication(r, s, None, f"{type(exc).__name__}: {exc}")
        out.replications.append(rep)
        if progress is not None:
            progress(rep)
    return out


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval for ``k`` successes in ``n`` trials.

    Examples:
        >>> clopper_pearson(0, 10)[0]
        0.0
    """
    from scipy.stats import beta

    if n == 0:
        return 0.0, 1.0
    a = 1.0 - level
    lo = 0.0 if k == 0 else float(beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def binomial_slack(p: float, n: int, sigmas: float = 3.0) -> float:
    """``p + sigmas * sqrt(p (1 - p) / n)``, the acceptance ceiling for a rate near ``p``.

    Examples:
        >>> round(binomial_slack(0.1, 400), 3)
        0.145
    """
    return p + sigmas * math.sqrt(p * (1.0 - p) / n)
