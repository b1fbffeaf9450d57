"""Vectorised adaptive Simpson quadrature over many segments at once.

All segments are refined level by level with numpy, so integrating a
piecewise-defined integrand over thousands of bins costs a handful of
array operations per level rather than one Python recursion per bin.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from purex.errors import QuadratureError

MAX_ACTIVE = 4_000_000


class Integral(NamedTuple):
    value: float
    error: float


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    edges,
    tol: float = 1e-8,
    max_depth: int = 50,
    min_depth: int = 2,
    segment_aware: bool = False,
) -> Integral:
    """Integrate ``f`` over ``[edges[0], edges[-1]]`` split at every edge.

    ``f`` must accept and return float arrays. With ``segment_aware`` it is
    called as ``f(x, mid)`` where ``mid`` holds the midpoint of the original
    segment each point came from, so a step function can be evaluated from
    inside its piece even at the segment endpoints. The absolute tolerance
    ``tol`` is shared between segments in proportion to their width and
    halved on every bisection, with the usual Richardson correction
    applied to accepted intervals.

    Raises:
        QuadratureError: if some interval is still unresolved at
            ``max_depth``; the exception carries the best estimate.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("need at least two edges")
    a = edges[:-1]
    b = edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return Integral(0.0, 0.0)
    width = float(b.sum() - a.sum())
    if not np.isfinite(width) or width <= 0:
        raise ValueError("edges must be finite and increasing")

    m = 0.5 * (a + b)
    mid0 = m.copy()
    if segment_aware:
        g = f
    else:
        def g(x, _mid):
            return f(x)
    fa, fm, fb = g(a, mid0), g(m, mid0), g(b, mid0)
    whole = _simpson(fa, fm, fb, b - a)
    itol = tol * (b - a) / width

    total = 0.0
    err = 0.0
    for depth in range(max_depth + 1):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = g(lm, mid0), g(rm, mid0)
        left = _simpson(fa, flm, fm, m - a)
        right = _simpson(fm, frm, fb, b - m)
        diff = left + right - whole
        done = np.abs(diff) <= 15.0 * itol
        if depth < min_depth:
            done[:] = False
        # intervals too narrow to split further are accepted as they are
        done |= (lm <= a) | (rm >= b)
        if done.any():
            total += float(np.sum(left[done] + right[done] + diff[done] / 15.0))
            err += float(np.sum(np.abs(diff[done]))) / 15.0
        act = ~done
        if not act.any():
            return Integral(total, err)
        if depth == max_depth or 2 * int(act.sum()) > MAX_ACTIVE:
            best = total + float(np.sum(left[act] + right[act]))
            raise QuadratureError(
                "adaptive Simpson did not converge",
                best,
                err + float(np.sum(np.abs(diff[act]))) / 15.0,
            )
        a_, m_, b_ = a[act], m[act], b[act]
        fa_, fm_, fb_ = fa[act], fm[act], fb[act]
        flm_, frm_ = flm[act], frm[act]
        a = np.concatenate([a_, m_])
        b = np.concatenate([m_, b_])
        m = np.concatenate([lm[act], rm[act]])
        fa = np.concatenate([fa_, fm_])
        fb = np.concatenate([fm_, fb_])
        fm = np.concatenate([flm_, frm_])
        whole = np.concatenate([left[act], right[act]])
        mid0 = np.concatenate([mid0[act], mid0[act]])
        itol = np.concatenate([itol[act], itol[act]]) * 0.5
    raise AssertionError("unreachable")


def integrate(f, lo: float, hi: float, pieces: int = 1, tol: float = 1e-10, breaks=()) -> Integral:
    """Integrate over ``[lo, hi]`` cut into ``pieces`` equal parts plus any ``breaks``."""
    edges = np.linspace(lo, hi, pieces + 1)
    if len(breaks):
        br = np.asarray(breaks, dtype=float)
        br = br[(br > lo) & (br < hi)]
        edges = np.unique(np.concatenate([edges, br]))
    return adaptive_simpson(f, edges, tol=tol)
