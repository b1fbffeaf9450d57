"""Compiled LUCB stepping loop.

The loop keeps, for every arm, the reward estimate ``H`` from its last
refresh (at ``n0`` observations) and bounds how far the current estimate
can have moved since then. While every decision (leader, challenger, stop
test) is the same for all estimates inside those bounds, it proceeds
without re-estimating. Otherwise it hands control back so the caller can
refresh the arms and re-enter. Arms with no new observations have a zero
bound and are compared exactly, so the decisions match a loop that
re-estimates the pulled arm at every step.

With a positive refresh growth the estimate and radius of each arm are
instead pinned to the count ``n0`` of its last refresh, so every decision
is exact and the caller is only needed when an arm's count reaches its
next refresh threshold ``nxt``.
"""

from __future__ import annotations

import math

from numba import njit

from purex.confidence import radius_kernel
from purex.estimation import (
    EST_BOUNDED,
    EST_UNBOUNDED,
    F_L,
    F_S1,
    F_S2,
    F_SHIFT,
    F_W,
    I_N,
    PUSH_GROW,
    PUSH_OK,
    _width_holds,
    _window_holds,
    push_span,
)

# how the estimate can move between refreshes
MODE_EXACT_MEAN = 0
MODE_EXACT_NEGMEAN = 1
MODE_MIXTURE = 2
MODE_GAUSS = 3

# exit codes
ST_STOP = 0
ST_CAP = 1
ST_REFILL = 2
ST_GROW_BUF = 3
ST_GROW_COUNTS = 4
ST_OUTSIDE = 5
ST_KEY = 6
ST_REFRESH = 7

SLACK = 1e-9
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _clamped_moments(fst, n, s2min, s2max):
    mu = fst[F_SHIFT] + fst[F_S1] / n
    if n > 1:
        s1 = fst[F_S1]
        var = max((fst[F_S2] - s1 * s1 / n) / (n - 1), 0.0)
    else:
        var = s2max
    return mu, min(max(var, s2min), s2max)


@njit(cache=True)
def _drift(i, n, n0, fst, mu0, v0, mode, scale, s2min, s2max):
    """Bound on ``|H_now - H_cached|`` for arm ``i``."""
    if n == n0[i]:
        return 0.0
    d = scale * (n - n0[i]) / n
    if mode == MODE_GAUSS:
        mu, v = _clamped_moments(fst, n, s2min, s2max)
        vmin = min(v, v0[i])
        d += abs(mu - mu0[i]) / math.sqrt(2.0 * math.pi * vmin) + abs(v - v0[i]) / (_SQRT_2PI * vmin)
    return d + SLACK


@njit(cache=True)
def _key_ok(est_kind, fst, n, C, beta, lam, level):
    if est_kind == EST_BOUNDED:
        return fst[F_L] == 0.0 and _width_holds(C * C * float(n), fst[F_W])
    if est_kind == EST_UNBOUNDED:
        return _window_holds(fst[F_L], fst[F_W], float(n), C, beta, lam, level)
    return True


@njit(cache=True)
def lucb_run(
    case_kind,
    p,
    delta,
    m,
    cap,
    state,
    bufs,
    ists,
    fsts,
    counts,
    tails,
    support,
    chunks,
    pos,
    H,
    n0,
    mu0,
    v0,
    D,
    rad,
    mode,
    scale,
    target_mean,
    s2min,
    s2max,
    est_kind,
    C,
    beta,
    lam,
    lazy,
    nxt,
    out,
):
    """Advance LUCB until it stops or needs the caller.

    ``state[0]`` holds ``t``. On exit ``out`` carries ``(i1, i2, arm)``
    where ``arm`` is the arm that needs attention.
    """
    t = state[0]
    while True:
        level = delta / (2.0 * m * float(t) * float(t))
        for i in range(m):
            n = n0[i] if lazy else ists[i][I_N]
            if not _key_ok(est_kind, fsts[i], n, C, beta, lam, level):
                state[0] = t
                return ST_KEY
        for i in range(m):
            if lazy:
                rad[i] = radius_kernel(case_kind, p, level, n0[i])
                D[i] = 0.0
            else:
                n = ists[i][I_N]
                rad[i] = radius_kernel(case_kind, p, level, n)
                D[i] = _drift(i, n, n0, fsts[i], mu0, v0, mode, scale, s2min, s2max)
        # leader: lowest-index argmax of H, certified for every H within D
        i1 = 0
        for i in range(1, m):
            if H[i] > H[i1]:
                i1 = i
        sure = True
        for j in range(m):
            if j == i1 or (D[i1] == 0.0 and D[j] == 0.0):
                continue
            if j < i1:
                if not (H[i1] - D[i1] > H[j] + D[j]):
                    sure = False
            elif not (H[i1] - D[i1] >= H[j] + D[j]):
                sure = False
        if not sure:
            state[0] = t
            return ST_REFRESH
        # challenger: lowest-index argmax of H + rad over the others
        i2 = -1
        for j in range(m):
            if j != i1 and (i2 < 0 or H[j] + rad[j] > H[i2] + rad[i2]):
                i2 = j
        for j in range(m):
            if j == i1 or j == i2 or (D[i2] == 0.0 and D[j] == 0.0):
                continue
            if j < i2:
                if not (H[i2] + rad[i2] - D[i2] > H[j] + rad[j] + D[j]):
                    sure = False
            elif not (H[i2] + rad[i2] - D[i2] >= H[j] + rad[j] + D[j]):
                sure = False
        if not sure:
            state[0] = t
            return ST_REFRESH
        a = H[i1] - rad[i1]
        b = H[i2] + rad[i2]
        out[0] = i1
        out[1] = i2
        if D[i1] == 0.0 and D[i2] == 0.0:
            stop = a >= b
        elif a - D[i1] >= b + D[i2]:
            stop = True
        elif a + D[i1] < b - D[i2]:
            stop = False
        else:
            state[0] = t
            return ST_REFRESH
        if stop:
            state[0] = t
            return ST_STOP
        if t >= cap:
            state[0] = t
            return ST_CAP
        if rad[i2] > rad[i1]:
            k = i2
        elif rad[i1] > rad[i2]:
            k = i1
        else:
            k = min(i1, i2)
        out[2] = k
        if pos[k] >= chunks[k].size:
            state[0] = t
            return ST_REFILL
        if ists[k][I_N] >= bufs[k].size:
            state[0] = t
            return ST_GROW_BUF
        _, s = push_span(bufs[k], ists[k], fsts[k], counts[k], tails[k], support, chunks[k], pos[k], pos[k] + 1)
        if s != PUSH_OK:
            state[0] = t
            return ST_GROW_COUNTS if s == PUSH_GROW else ST_OUTSIDE
        pos[k] += 1
        t += 1
        if lazy:
            if ists[k][I_N] >= nxt[k]:
                state[0] = t
                return ST_REFRESH
        elif mode == MODE_EXACT_MEAN or mode == MODE_EXACT_NEGMEAN:
            n = ists[k][I_N]
            mu = fsts[k][F_SHIFT] + fsts[k][F_S1] / n
            H[k] = mu if mode == MODE_EXACT_MEAN else -abs(mu - target_mean)
            n0[k] = n
