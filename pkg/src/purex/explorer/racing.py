"""Racing: phased successive elimination with halving radii."""

from __future__ import annotations

import math
from dataclasses import dataclass

from purex import rewards
from purex.confidence import n_H
from purex.estimation import EST_RAW
from purex.explorer.problem import Problem, RunResult, argmax_first
from purex.arms import RandomSource
from purex.explorer.streams import CHUNK, ArmStream


@dataclass(frozen=True)
class Phase:
    """One racing phase as recorded in the trace."""

    k: int
    rad: float
    delta_k: float
    n_target: int
    survivors: tuple
    estimates: tuple
    eliminated: tuple


def phase_schedule(delta: float, survivors: int, k: int) -> tuple[float, float]:
    """Radius ``2^-k`` and level ``delta / (2 |A| k^2)`` of phase ``k``.

    Examples:
        >>> phase_schedule(0.1, 3, 2)
        (0.25, 0.004166666666666667)
    """
    return 2.0**-k, delta / (2.0 * survivors * k * k)


def eliminate(estimates: dict, rad: float) -> list:
    """Arms ``j`` with ``max_i H_i - 2 rad >= H_j``; the maximizer itself is kept.

    Examples:
        >>> eliminate({0: 0.8, 1: 0.2, 2: 0.7}, 0.25)
        [1]
    """
    arms_ = list(estimates)
    best = arms_[argmax_first([estimates[a] for a in arms_])]
    top = estimates[best]
    return [j for j in arms_ if j != best and top - 2.0 * rad >= estimates[j]]


def eliminate_intervals(intervals: dict) -> list:
    """Arms whose upper end lies at or below the largest lower end among the others."""
    arms_ = list(intervals)
    best = arms_[argmax_first([intervals[a][0] for a in arms_])]
    lo = intervals[best][0]
    return [j for j in arms_ if j != best and lo >= intervals[j][1]]


class _Arm:
    """One arm's observations during a race.

    Stores whose estimate needs the raw values keep them and are topped up.
    Binned and counted stores instead replay the arm's stream from the start
    into a fresh store laid out for the phase, which yields the same
    observations with memory independent of the sample size.
    """

    def __init__(self, problem: Problem, dist, source: RandomSource):
        self.problem = problem
        self.dist = dist
        self.source = source
        self.store = problem.new_store()
        self.replay = self.store.kind != EST_RAW
        self.stream = ArmStream(dist, source)

    @property
    def n(self) -> int:
        return self.store.n

    def advance(self, n_target: int, level: float) -> None:
        if not self.replay:
            self.store.extend(self.stream.take(n_target - self.store.n))
            return
        fresh = self.problem.new_store_lean()
        fresh.rekey(fresh.key_for(level, n_target))
        stream = ArmStream(self.dist, self.source)
        left = n_target
        while left > 0:
            k = min(left, CHUNK)
            fresh.extend(stream.take(k))
            left -= k
        self.store = fresh


def racing(problem: Problem, seed: int, keep_trace: bool = True) -> RunResult:
    """Run the racing framework on one replication.

    Each phase ``k`` tops every surviving arm up to ``n_H(delta_k, 2^-k)``
    observations, re-estimates, and drops every arm whose estimate trails
    the leader by at least twice the radius.

    Args:
        problem: The instance.
        seed: Replication seed; arm ``i`` draws from stream ``(seed, i)``.
        keep_trace: Record one :class:`Phase` per phase.
    """
    root = RandomSource(int(seed))
    arms_ = [_Arm(problem, d, root.child(i)) for i, d in enumerate(problem.arms)]
    reward, case = problem.reward, problem.case
    cap = problem.cap_for("racing")
    alive = list(range(problem.m))
    trace = []
    leader = 0
    last: dict = {}
    k = 0
    reason = "converged"
    while len(alive) > 1:
        k += 1
        rad, level = phase_schedule(problem.delta, len(alive), k)
        target = n_H(case, level, rad)
        need = sum(max(target - arms_[i].n, 0) for i in alive)
        total = sum(a.n for a in arms_)
        if total + need > cap:
            reason = "budget_cap"
            break
        for i in alive:
            if arms_[i].n < target:
                arms_[i].advance(target, level)
        if reward.uses_intervals:
            iv = {i: rewards.interval_from_store(reward, arms_[i].store, level) for i in alive}
            est = {i: rewards.estimate_from_store(reward, arms_[i].store, level) for i in alive}
            gone = eliminate_intervals(iv)
            leader = alive[argmax_first([iv[i][0] for i in alive])]
        else:
            est = {i: rewards.estimate_from_store(reward, arms_[i].store, level) for i in alive}
            gone = eliminate(est, rad)
            leader = alive[argmax_first([est[i] for i in alive])]
        last = est
        if keep_trace:
            trace.append(Phase(k, rad, level, target, tuple(alive), tuple(est[i] for i in alive), tuple(gone)))
        alive = [i for i in alive if i not in gone]
    out = alive[0] if len(alive) == 1 else leader
    counts = tuple(a.n for a in arms_)
    finals = tuple(last.get(i, math.nan) for i in range(problem.m))
    return RunResult(out, sum(counts), counts, reason, "racing", trace, finals)
