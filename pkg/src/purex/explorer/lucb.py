"""LUCB: sample the leader or its strongest challenger until they separate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba.typed import List

from purex import metrics, rewards
from purex.confidence import radius_kernel
from purex.errors import DataError
from purex.estimation import EST_FINITE, EST_RAW
from purex.explorer import _kernel as K
from purex.explorer.problem import Problem, RunResult, argmax_first, level_at
from purex.explorer.streams import arm_streams
from purex.rewards import RewardKind


@dataclass(frozen=True)
class Step:
    """One LUCB iteration as recorded in the trace."""

    t: int
    i1: int
    i2: int
    pulled: int
    radii: tuple


def select(H, rad) -> tuple[int, int, bool, int]:
    """Leader, challenger, stop flag and the arm to pull next.

    The leader maximizes ``H``; the challenger maximizes ``H + rad`` among
    the rest (lowest index on ties). The run stops once the leader's lower
    end reaches the challenger's upper end; otherwise the wider of the two
    is pulled.

    Examples:
        >>> select([0.8, 0.3], [0.05, 0.05])[2]
        True
        >>> select([0.8, 0.7], [0.02, 0.3])
        (0, 1, False, 1)
    """
    m = len(H)
    i1 = argmax_first(H)
    others = [j for j in range(m) if j != i1]
    i2 = others[argmax_first([H[j] + rad[j] for j in others])]
    stop = H[i1] - rad[i1] >= H[i2] + rad[i2]
    return i1, i2, stop, _wider(i1, i2, rad[i1], rad[i2])


def select_intervals(point, lo, hi, counts=None) -> tuple[int, int, bool, int]:
    """:func:`select` with explicit ``(lo, hi)`` intervals in place of ``H -/+ rad``.

    Equal widths, such as two unbounded intervals, go to the arm with fewer
    observations when ``counts`` is given.

    Examples:
        >>> inf = float("inf")
        >>> select_intervals([0.5, 0.0], [-inf, -inf], [inf, inf], counts=[3, 1])
        (0, 1, False, 1)
    """
    m = len(point)
    i1 = argmax_first(point)
    others = [j for j in range(m) if j != i1]
    i2 = others[argmax_first([hi[j] for j in others])]
    stop = lo[i1] >= hi[i2]
    w1, w2 = hi[i1] - lo[i1], hi[i2] - lo[i2]
    if counts is not None and w1 == w2 and counts[i1] != counts[i2]:
        return i1, i2, stop, i1 if counts[i1] < counts[i2] else i2
    return i1, i2, stop, _wider(i1, i2, w1, w2)


def _wider(i1, i2, w1, w2):
    if w2 > w1:
        return i2
    if w1 > w2:
        return i1
    return min(i1, i2)


def _radius(problem: Problem, level: float, n: int) -> float:
    # the compiled kernel, so both paths produce identical bits
    return float(radius_kernel(int(problem.case.kind), problem.case.params, level, n))


def lucb(
    problem: Problem,
    seed: int,
    keep_trace: bool = False,
    accelerated: bool | None = None,
    refresh_growth: float = 0.0,
) -> RunResult:
    """Run LUCB on one replication.

    Args:
        problem: The instance.
        seed: Replication seed; arm ``i`` draws from stream ``(seed, i)``.
        keep_trace: Record one :class:`Step` per iteration (forces the
            plain Python loop).
        accelerated: Use the compiled loop. Defaults to True unless a trace
            is requested or the reward uses intervals. Both loops return
            identical results.
        refresh_growth: With the default 0 the pulled arm is re-estimated
            after every pull. A positive ``g`` re-estimates an arm only once
            its count reaches ``ceil((1 + g) b)``, where ``b`` is its count
            at the previous estimate, and uses ``b`` in its radius until then.
    """
    if not refresh_growth >= 0.0:
        raise ValueError("refresh_growth must be nonnegative")
    if accelerated is None:
        accelerated = not keep_trace and not problem.reward.uses_intervals
    if accelerated and (keep_trace or problem.reward.uses_intervals):
        raise ValueError("the compiled loop keeps no trace and does not handle interval rewards")
    if accelerated:
        return _lucb_compiled(problem, seed, refresh_growth)
    return lucb_reference(problem, seed, keep_trace, refresh_growth)


def _start(problem: Problem, seed: int):
    streams = arm_streams(problem, seed)
    stores = [problem.new_store() for _ in range(problem.m)]
    for s, st in zip(stores, streams):
        s.extend([st.next()])
    return streams, stores


class _Snapshots:
    """Per-arm estimate, basis count and refresh threshold, shared by both loops."""

    def __init__(self, problem: Problem, stores, growth: float):
        m = problem.m
        self.problem, self.stores, self.growth = problem, stores, float(growth)
        self.H = np.zeros(m)
        self.n0 = np.zeros(m, dtype=np.int64)
        self.nxt = np.zeros(m, dtype=np.int64)
        self.mu0 = np.zeros(m)
        self.v0 = np.ones(m)
        self.sorted = [np.empty(0)] * m

    @property
    def lazy(self) -> bool:
        return self.growth > 0.0

    def basis(self, i: int) -> int:
        return int(self.n0[i]) if self.lazy else self.stores[i].n

    def stale(self, i: int, level: float) -> bool:
        s = self.stores[i]
        if s.n != self.n0[i] and s.n >= self.nxt[i]:
            return True
        return s.key_for(level, self.basis(i)) != s.key

    def refresh(self, i: int, level: float) -> None:
        reward, s = self.problem.reward, self.stores[i]
        s.ensure_key(level)
        self.H[i] = rewards.estimate_from_store(reward, s, level)
        n = s.n
        self.n0[i] = n
        self.nxt[i] = max(n + 1, math.ceil((1.0 + self.growth) * n))
        if reward.kind is RewardKind.NEG_TV_FITTED_GAUSSIAN:
            g = rewards._fitted(reward, *s.moments())
            self.mu0[i], self.v0[i] = g.mu, g.var
        if reward.uses_intervals:
            self.sorted[i] = np.sort(s.values)


def lucb_reference(problem: Problem, seed: int, keep_trace: bool = False, refresh_growth: float = 0.0) -> RunResult:
    """Plain Python LUCB; see :func:`lucb`."""
    reward, m = problem.reward, problem.m
    cap = problem.cap_for("lucb")
    streams, stores = _start(problem, seed)
    snap = _Snapshots(problem, stores, refresh_growth)
    level = level_at(problem.delta, m, m)
    for i in range(m):
        snap.refresh(i, level)
    t = m
    trace = []
    while True:
        level = level_at(problem.delta, m, t)
        for i in range(m):
            if snap.stale(i, level):
                snap.refresh(i, level)
        H = snap.H.tolist()
        if reward.uses_intervals:
            iv = [rewards._quantile_ci_sorted(snap.sorted[i], reward.tau, level, open_ends=True) for i in range(m)]
            lo, hi = [a for a, _ in iv], [b for _, b in iv]
            i1, i2, stop, k = select_intervals(H, lo, hi, [s.n for s in stores])
            widths = tuple(b - a for a, b in iv)
        else:
            rad = [_radius(problem, level, snap.basis(i)) for i in range(m)]
            i1, i2, stop, k = select(H, rad)
            widths = tuple(rad)
        if stop or t >= cap:
            if keep_trace:
                trace.append(Step(t, i1, i2, -1, widths))
            reason = "converged" if stop else "budget_cap"
            break
        if keep_trace:
            trace.append(Step(t, i1, i2, k, widths))
        stores[k].extend([streams[k].next()])
        t += 1
    counts = tuple(s.n for s in stores)
    return RunResult(i1, sum(counts), counts, reason, "lucb", trace, tuple(H))


def _mode(problem: Problem, store) -> tuple[int, float, float]:
    """Drift mode, drift scale and target mean for the compiled loop."""
    reward = problem.reward
    if reward.mean_like and store.kind == EST_RAW:
        if reward.kind is RewardKind.MEAN:
            return K.MODE_EXACT_MEAN, 0.0, 0.0
        return K.MODE_EXACT_NEGMEAN, 0.0, float(metrics.dist_mean(reward.target))
    if reward.kind is RewardKind.NEG_TV_FITTED_GAUSSIAN:
        return K.MODE_GAUSS, 1.0, 0.0
    scale = 1.0
    if reward.mean_like and store.kind == EST_FINITE:
        scale = float(store.support[-1] - store.support[0])
    return K.MODE_MIXTURE, scale, 0.0


def _lucb_compiled(problem: Problem, seed: int, growth: float) -> RunResult:
    reward, case, m = problem.reward, problem.case, problem.m
    cap = problem.cap_for("lucb")
    streams, stores = _start(problem, seed)
    snap = _Snapshots(problem, stores, growth)
    mode, scale, target_mean = _mode(problem, stores[0])
    s2min = float(reward.sigma2_min or 0.0)
    s2max = float(reward.sigma2_max or 0.0)
    est_kind = stores[0].kind
    for st in streams:
        if st.pos == st.chunk.size:
            st.refill()

    bufs, ists, fsts, counts, tails, chunks = List(), List(), List(), List(), List(), List()
    for s, st in zip(stores, streams):
        bufs.append(s.buf)
        ists.append(s.ist)
        fsts.append(s.fst)
        counts.append(s.counts)
        tails.append(s.tails)
        chunks.append(st.chunk)
    support = stores[0].support
    pos = np.array([st.pos for st in streams], dtype=np.int64)
    D = np.zeros(m)
    rad = np.zeros(m)
    state = np.array([m], dtype=np.int64)
    out = np.zeros(3, dtype=np.int64)

    def refresh_stale(t):
        level = level_at(problem.delta, m, t)
        for i in range(m):
            if snap.stale(i, level):
                snap.refresh(i, level)
                counts[i] = stores[i].counts

    level = level_at(problem.delta, m, m)
    for i in range(m):
        snap.refresh(i, level)
        counts[i] = stores[i].counts

    while True:
        code = K.lucb_run(
            int(case.kind), case.params, float(problem.delta), m, int(cap), state,
            bufs, ists, fsts, counts, tails, support, chunks, pos,
            snap.H, snap.n0, snap.mu0, snap.v0, D, rad,
            mode, scale, target_mean, s2min, s2max,
            est_kind, float(case.C or 0.0), float(case.beta or 0.0), float(case.lam or 0.0),
            snap.lazy, snap.nxt, out,
        )  # fmt: skip
        t = int(state[0])
        k = int(out[2])
        if code == K.ST_STOP or code == K.ST_CAP:
            break
        if code == K.ST_KEY or code == K.ST_REFRESH:
            refresh_stale(t)
        elif code == K.ST_REFILL:
            streams[k].refill()
            chunks[k] = streams[k].chunk
            pos[k] = 0
        elif code == K.ST_GROW_BUF:
            stores[k].reserve(max(stores[k].buf.size, 1))
            bufs[k] = stores[k].buf
        elif code == K.ST_GROW_COUNTS:
            stores[k].grow_counts(int(streams[k].chunk[pos[k]]))
            counts[k] = stores[k].counts
        else:
            raise DataError(f"observation {streams[k].chunk[pos[k]]!r} is outside the declared support")
    # bring cached estimates up to the state the plain loop would report
    refresh_stale(t)
    for i, st in enumerate(streams):
        st.pos = int(pos[i])
    cnt = tuple(s.n for s in stores)
    reason = "converged" if code == K.ST_STOP else "budget_cap"
    return RunResult(int(out[0]), sum(cnt), cnt, reason, "lucb", [], tuple(float(h) for h in snap.H))
