"""Distances between distributions: mean, Kolmogorov-Smirnov and total variation.

Every function accepts exact arm distributions from :mod:`purex.arms` and
estimates from :mod:`purex.estimation` interchangeably. Total variation
between two densities is computed by adaptive quadrature of half the
absolute difference; :func:`tv_to_gaussian` adds an exact closed form for
histogram estimates against a Gaussian, which is what the Gaussian-fit
reward evaluates repeatedly.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping

import numpy as np
from scipy import optimize, special

from purex import arms
from purex.errors import AlignmentError, SupportTooLargeError, VariantMismatchError
from purex.estimation import EmpiricalPmf, PiecewiseDensity, TailedPiecewiseDensity
from purex.quadrature import Integral, adaptive_simpson

BRUTEFORCE_LIMIT = 20
GAUSS_SPAN = 10.0  # standard deviations kept on each side; the rest has mass < 1e-22
TV_TOL = 1e-8


class DistanceKind(enum.Enum):
    MEAN = "Mean"
    KOLMOGOROV_SMIRNOV = "KolmogorovSmirnov"
    TOTAL_VARIATION = "TotalVariation"

    @classmethod
    def parse(cls, name: str) -> "DistanceKind":
        aliases = {"mean": cls.MEAN, "ks": cls.KOLMOGOROV_SMIRNOV, "kolmogorovsmirnov": cls.KOLMOGOROV_SMIRNOV,
                   "tv": cls.TOTAL_VARIATION, "totalvariation": cls.TOTAL_VARIATION}
        key = str(name).replace("_", "").replace("-", "").lower()
        if key not in aliases:
            raise ValueError(f"unknown distance {name!r}")
        return aliases[key]


# classification helpers ----------------------------------------------------------------

_DISCRETE = (arms.DiscreteFinite, arms.DiscreteCountable, EmpiricalPmf)
_CONTINUOUS = (arms.ContinuousBounded, arms.ContinuousUnbounded, arms.Gaussian, PiecewiseDensity, TailedPiecewiseDensity)
_ESTIMATES = (PiecewiseDensity, TailedPiecewiseDensity)


def is_discrete(d) -> bool:
    return isinstance(d, _DISCRETE) or isinstance(d, Mapping)


def _mapping(d) -> dict:
    """Label-to-probability mapping with zero-mass labels dropped."""
    if isinstance(d, Mapping):
        items = d.items()
    elif isinstance(d, arms.DiscreteFinite):
        items = zip(d.support, d.probs)
    elif isinstance(d, EmpiricalPmf):
        items = zip(d.support.tolist(), d.probs)
    elif isinstance(d, arms.DiscreteCountable):
        tab = d.table()
        items = zip(range(tab.size), tab)
    else:
        raise VariantMismatchError(f"{type(d).__name__} is not discrete")
    out: dict = {}
    for k, v in items:
        if isinstance(k, (np.integer, np.floating)):
            k = k.item()
        if isinstance(k, float) and k.is_integer():
            k = int(k)
        out[k] = out.get(k, 0.0) + float(v)
    return out


def dist_mean(d) -> float:
    if isinstance(d, (EmpiricalPmf, PiecewiseDensity, TailedPiecewiseDensity)):
        return d.mean()
    if isinstance(d, Mapping):
        return float(sum(float(k) * v for k, v in d.items()))
    return arms.mean(d)


def dist_cdf(d, x):
    if isinstance(d, (EmpiricalPmf, PiecewiseDensity, TailedPiecewiseDensity)):
        return d.cdf(x)
    if isinstance(d, Mapping):
        keys = np.array(sorted(d), dtype=float)
        cum = np.concatenate([[0.0], np.cumsum([d[k] for k in sorted(d)])])
        return np.minimum(cum[np.searchsorted(keys, np.asarray(x, dtype=float), side="right")], 1.0)
    return arms.cdf(d, x)


def _span(d) -> tuple[float, float]:
    if isinstance(d, arms.Gaussian):
        return d.mu - GAUSS_SPAN * d.sigma, d.mu + GAUSS_SPAN * d.sigma
    if isinstance(d, arms.ContinuousBounded):
        return 0.0, 1.0
    if isinstance(d, arms.ContinuousUnbounded):
        return -d.reach, d.reach
    return d.lo, d.hi


def _breaks(d) -> np.ndarray:
    if isinstance(d, arms.Gaussian):
        return np.array([d.mu])
    if isinstance(d, arms.ContinuousBounded):
        return np.array([0.0, 1.0])
    if isinstance(d, arms.ContinuousUnbounded):
        return np.asarray(d.breaks, dtype=float)
    return d.edges


def _piece_fn(d):
    if isinstance(d, _ESTIMATES):
        return d.piece_density
    return lambda x, _mid: arms.density(d, x)


# mean ------------------------------------------------------------------------------------


def mean_distance(a, b) -> float:
    """``|E[a] - E[b]|``.

    Examples:
        >>> round(mean_distance(arms.bernoulli(0.7), arms.bernoulli(0.4)), 12)
        0.3
    """
    return abs(dist_mean(a) - dist_mean(b))


# Kolmogorov-Smirnov ---------------------------------------------------------------------


def _jumps(d) -> np.ndarray:
    m = _mapping(d)
    try:
        return np.array(sorted(float(k) for k, v in m.items() if v > 0))
    except (TypeError, ValueError):
        raise VariantMismatchError("KS distance needs numeric support") from None


def ks_distance(a, b, grid: int = 4097) -> float:
    """``sup_x |F_a(x) - F_b(x)|``.

    Discrete pairs are compared at every jump point. A discrete cdf against
    a continuous one is compared at each jump and its left limit, which is
    exact because the discrete cdf is flat in between. Two continuous cdfs
    are compared on a grid over the union of their spans and the best grid
    point is refined locally.
    """
    da, db = is_discrete(a), is_discrete(b)
    if da and db:
        x = np.union1d(_jumps(a), _jumps(b))
        return float(np.max(np.abs(dist_cdf(a, x) - dist_cdf(b, x)), initial=0.0))
    if da or db:
        disc, cont = (a, b) if da else (b, a)
        x = _jumps(disc)
        F = np.asarray(dist_cdf(disc, x), dtype=float)
        left = np.concatenate([[0.0], F[:-1]])
        G = np.asarray(dist_cdf(cont, x), dtype=float)
        return float(max(np.max(np.abs(F - G)), np.max(np.abs(left - G))))
    lo = min(_span(a)[0], _span(b)[0])
    hi = max(_span(a)[1], _span(b)[1])
    br = np.concatenate([_breaks(a), _breaks(b)])
    x = np.unique(np.concatenate([np.linspace(lo, hi, grid), br[(br >= lo) & (br <= hi)]]))

    def gap(t):
        return np.abs(np.asarray(dist_cdf(a, t), dtype=float) - np.asarray(dist_cdf(b, t), dtype=float))

    g = gap(x)
    i = int(np.argmax(g))
    best = float(g[i])
    lo_i, hi_i = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
    if hi_i > lo_i:
        res = optimize.minimize_scalar(lambda t: -float(gap(np.array([t]))[0]), bounds=(lo_i, hi_i), method="bounded",
                                       options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return min(best, 1.0)


# total variation: discrete ---------------------------------------------------------------


def tv_discrete(p, q) -> float:
    """Half the L1 distance between two pmfs.

    Arrays must be aligned (same length, same label order). Mappings and
    discrete distributions are aligned on the union of their supports,
    with missing labels counted as zero mass.

    Raises:
        AlignmentError: if two arrays have different lengths.

    Examples:
        >>> round(tv_discrete([0.7, 0.3], [0.4, 0.6]), 12)
        0.3
    """
    if isinstance(p, (list, tuple, np.ndarray)) and isinstance(q, (list, tuple, np.ndarray)):
        pa = np.asarray(p, dtype=float)
        qa = np.asarray(q, dtype=float)
        if pa.shape != qa.shape or pa.ndim != 1:
            raise AlignmentError(f"probability vectors have shapes {pa.shape} and {qa.shape}")
        return float(0.5 * np.sum(np.abs(pa - qa)))
    mp, mq = _mapping(p), _mapping(q)
    keys = list(mp)
    keys += [k for k in mq if k not in mp]
    pa = np.array([mp.get(k, 0.0) for k in keys])
    qa = np.array([mq.get(k, 0.0) for k in keys])
    return float(0.5 * np.sum(np.abs(pa - qa)))


def tv_bruteforce(p, q) -> float:
    """``max_A |p(A) - q(A)|`` by enumerating every subset of the support.

    Raises:
        SupportTooLargeError: above 20 support points.
    """
    if isinstance(p, (list, tuple, np.ndarray)) and isinstance(q, (list, tuple, np.ndarray)):
        pa = np.asarray(p, dtype=float)
        qa = np.asarray(q, dtype=float)
        if pa.shape != qa.shape:
            raise AlignmentError(f"probability vectors have shapes {pa.shape} and {qa.shape}")
    else:
        mp, mq = _mapping(p), _mapping(q)
        keys = list(dict.fromkeys(list(mp) + list(mq)))
        pa = np.array([mp.get(k, 0.0) for k in keys])
        qa = np.array([mq.get(k, 0.0) for k in keys])
    if pa.size > BRUTEFORCE_LIMIT:
        raise SupportTooLargeError(f"support of size {pa.size} exceeds {BRUTEFORCE_LIMIT}")
    sums = np.zeros(1)
    for d in pa - qa:
        sums = np.concatenate([sums, sums + d])
    return float(np.max(np.abs(sums)))


# total variation: continuous -------------------------------------------------------------


def tv_continuous(a, b, tol: float = TV_TOL) -> Integral:
    """``(1/2) int |f_a - f_b|`` by adaptive Simpson quadrature.

    The integration range is the union of both spans (tails of estimates
    extend ``40 / lam`` past their window) and every bin edge or declared
    breakpoint starts a new segment, so each segment sees a single piece of
    any step density.

    Returns:
        The value, clipped to ``[0, 1]``, and the quadrature's error estimate.

    Raises:
        QuadratureError: if the integrand cannot be resolved.
    """
    if is_discrete(a) or is_discrete(b):
        raise VariantMismatchError("tv_continuous needs two densities")
    lo = min(_span(a)[0], _span(b)[0])
    hi = max(_span(a)[1], _span(b)[1])
    br = np.concatenate([_breaks(a), _breaks(b), [_span(a)[0], _span(a)[1], _span(b)[0], _span(b)[1]]])
    edges = np.unique(np.concatenate([np.linspace(lo, hi, 65), br[(br >= lo) & (br <= hi)]]))
    fa, fb = _piece_fn(a), _piece_fn(b)
    res = adaptive_simpson(lambda x, mid: 0.5 * np.abs(fa(x, mid) - fb(x, mid)), edges, tol=tol, segment_aware=True)
    return Integral(min(max(res.value, 0.0), 1.0), res.error)


def _gmass(a, b, mu, sigma):
    """Gaussian mass of ``[a, b]`` computed on the accurate side of the mean."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    upper = a > mu
    hi_side = special.ndtr((mu - a) / sigma) - special.ndtr((mu - b) / sigma)
    lo_side = special.ndtr((b - mu) / sigma) - special.ndtr((a - mu) / sigma)
    return np.maximum(np.where(upper, hi_side, lo_side), 0.0)


def _overlap_bins(a, b, h, mu, sigma):
    """``sum_s int_{a_s}^{b_s} min(h_s, phi)``."""
    mass = _gmass(a, b, mu, sigma)
    c = h * sigma * math.sqrt(2.0 * math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = sigma * np.sqrt(np.maximum(-2.0 * np.log(np.where(c > 0, c, 1.0)), 0.0))
    # phi exceeds h exactly on (mu - r, mu + r); elsewhere the overlap is phi itself
    ilo = np.maximum(a, mu - r)
    ihi = np.minimum(b, mu + r)
    has = (c < 1.0) & (ihi > ilo) & (h > 0)
    inner = np.where(has, h * (ihi - ilo) - _gmass(np.where(has, ilo, 0.0), np.where(has, ihi, 0.0), mu, sigma), 0.0)
    return np.where(h > 0, mass + inner, 0.0)


def _overlap_tail(m, lam, L, mu, sigma):
    """``int_L^inf min(m lam e^{-lam (z - L)}, phi(z)) dz``."""
    if m <= 0.0:
        return 0.0
    s2 = sigma * sigma
    K = math.log(m * lam) + lam * L + math.log(sigma * math.sqrt(2.0 * math.pi))
    bq = mu + s2 * lam
    disc = bq * bq - mu * mu - 2.0 * s2 * K
    whole = float(_gmass(L, math.inf, mu, sigma))
    if disc <= 0.0:
        return whole
    root = math.sqrt(disc)
    z1, z2 = bq - root, bq + root
    ilo, ihi = max(L, z1), z2
    if ihi <= ilo:
        return whole
    # on (z1, z2) the Gaussian exceeds the tail, so the tail is the minimum there
    tail = m * (math.exp(-lam * (ilo - L)) - math.exp(-lam * (ihi - L)))
    return whole - float(_gmass(ilo, ihi, mu, sigma)) + tail


def tv_gaussians(g1: arms.Gaussian, g2: arms.Gaussian) -> float:
    """Exact total variation between two normal distributions."""
    m1, v1, m2, v2 = g1.mu, g1.var, g2.mu, g2.var
    if v1 == v2:
        return float(special.erf(abs(m1 - m2) / (2.0 * math.sqrt(2.0 * v1))))
    # log densities cross where A x^2 + B x + C = 0
    A = 1.0 / (2.0 * v2) - 1.0 / (2.0 * v1)
    B = m1 / v1 - m2 / v2
    C = m2 * m2 / (2.0 * v2) - m1 * m1 / (2.0 * v1) - 0.5 * math.log(v1 / v2)
    disc = max(B * B - 4.0 * A * C, 0.0)
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    r1 = q / A
    r2 = C / q if q != 0.0 else r1
    lo, hi = min(r1, r2), max(r1, r2)
    p1 = float(_gmass(lo, hi, m1, math.sqrt(v1)))
    p2 = float(_gmass(lo, hi, m2, math.sqrt(v2)))
    return min(abs(p1 - p2), 1.0)


def tv_to_gaussian(est, g: arms.Gaussian) -> float:
    """Exact total variation between a histogram estimate and a Gaussian.

    Uses ``TV = 1 - int min(p, phi)``. On a bin of height ``h`` the Gaussian
    exceeds ``h`` on a single interval around its mean, and against an
    exponential tail the crossing points solve a quadratic, so every piece
    of the overlap integral is a Gaussian cdf difference or an exponential.
    """
    mu, sigma = g.mu, g.sigma
    if isinstance(est, arms.Gaussian):
        return tv_gaussians(est, g)
    if not isinstance(est, _ESTIMATES):
        raise VariantMismatchError("tv_to_gaussian needs a histogram estimate")
    e = est.edges
    overlap = float(np.sum(_overlap_bins(e[:-1], e[1:], est.heights, mu, sigma)))
    if isinstance(est, TailedPiecewiseDensity):
        L, lam = est.half_width, est.lam
        overlap += _overlap_tail(est.right, lam, L, mu, sigma)
        overlap += _overlap_tail(est.left, lam, L, -mu, sigma)
    return min(max(1.0 - overlap, 0.0), 1.0)


def tv_distance(a, b) -> float:
    """Total variation between any two supported distributions.

    Discrete against continuous is 1, since one measure is carried by a
    countable set the other gives no mass.
    """
    da, db = is_discrete(a), is_discrete(b)
    if da and db:
        return tv_discrete(a, b)
    if da or db:
        return 1.0
    if isinstance(b, arms.Gaussian) and isinstance(a, _ESTIMATES + (arms.Gaussian,)):
        return tv_to_gaussian(a, b)
    if isinstance(a, arms.Gaussian) and isinstance(b, _ESTIMATES):
        return tv_to_gaussian(b, a)
    return tv_continuous(a, b).value


def distance(kind: DistanceKind, a, b) -> float:
    """Dispatch on ``kind``."""
    if kind is DistanceKind.MEAN:
        return mean_distance(a, b)
    if kind is DistanceKind.KOLMOGOROV_SMIRNOV:
        return ks_distance(a, b)
    return tv_distance(a, b)
