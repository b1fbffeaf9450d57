"""Distribution estimators and the observation store behind the frameworks.

Three estimators turn a batch of observations into an
:class:`EstimatedDistribution`:

* :func:`empirical_pmf` counts labels over a finite support or over the
  nonnegative integers.
* :func:`binned_density` builds a histogram density on ``[0, 1]`` whose bin
  width balances binning bias against sampling noise.
* :func:`unbounded_density` does the same on ``[-L, L]`` and spreads the
  mass that falls outside as exponential tails.

Bins are ``[a, a + w]`` for the first and ``(a, a + w]`` for every other
one. Bin indices are computed as ``ceil(x / w)`` plus an integer offset;
``x / w`` is exact for power-of-two widths, so boundary points always land
in the bin the convention says they should.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from purex.errors import DataError, InsufficientDataError

# smallest bin width the halving loops will reach
MIN_WIDTH_EXP = 60


# estimated distributions --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmpiricalPmf:
    """Observed frequencies over a sorted numeric support.

    Attributes:
        support: Sorted support values.
        probs: Frequencies, summing to one.
        n: Number of observations.
    """

    support: np.ndarray
    probs: np.ndarray
    n: int

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def cdf(self, x):
        cum = np.concatenate([[0.0], np.cumsum(self.probs)])
        v = np.minimum(cum[np.searchsorted(self.support, np.asarray(x, dtype=float), side="right")], 1.0)
        return float(v) if np.ndim(x) == 0 else v

    def as_mapping(self) -> dict:
        return {float(s): float(p) for s, p in zip(self.support, self.probs)}


@dataclass(frozen=True, eq=False)
class PiecewiseDensity:
    """Histogram density on ``[0, 1]`` with ``r = 1 / width`` equal bins.

    Attributes:
        width: Bin width, a power of two no larger than one half.
        heights: Density value on each bin.
        n: Number of observations the histogram was built from.
    """

    width: float
    heights: np.ndarray
    n: int

    @property
    def bins(self) -> int:
        return self.heights.size

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.bins + 1) * self.width

    @property
    def lo(self) -> float:
        return 0.0

    @property
    def hi(self) -> float:
        return 1.0

    def masses(self) -> np.ndarray:
        return self.heights * self.width

    def density(self, x):
        x = np.asarray(x, dtype=float)
        idx = bounded_bin(x, self.width)
        inside = (x >= 0.0) & (x <= 1.0)
        return np.where(inside, self.heights[np.clip(idx, 0, self.bins - 1)], 0.0)

    def piece_density(self, x, mid):
        """Density at ``x`` taking the bin from ``mid``, a point strictly inside it."""
        inside = (mid > 0.0) & (mid < 1.0)
        idx = np.clip(np.floor(mid / self.width).astype(np.int64), 0, self.bins - 1)
        return np.where(inside, self.heights[idx], 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.masses())])
        t = np.clip(x, 0.0, 1.0) / self.width
        k = np.clip(np.floor(t).astype(np.int64), 0, self.bins - 1)
        v = cum[k] + (t - k) * self.masses()[k]
        v = np.clip(np.where(x >= 1.0, 1.0, v), 0.0, 1.0)
        return float(v) if v.ndim == 0 else v

    def mean(self) -> float:
        mids = (np.arange(self.bins) + 0.5) * self.width
        return float(np.dot(mids, self.masses()))

    def total_mass(self) -> float:
        return float(self.masses().sum())


@dataclass(frozen=True, eq=False)
class TailedPiecewiseDensity:
    """Histogram on ``[-L, L]`` plus exponential tails of rate ``lam``.

    Below ``-L`` the density is ``left * lam * exp(-lam (-z - L))`` and
    above ``L`` it is ``right * lam * exp(-lam (z - L))``.

    Attributes:
        half_width: ``L``, a power of two.
        width: Bin width ``ell``, a power of two no larger than one half.
        heights: Interior densities, ``2 L / ell`` of them.
        left: Mass of the left tail.
        right: Mass of the right tail.
        lam: Tail decay rate.
        n: Number of observations.
    """

    half_width: float
    width: float
    heights: np.ndarray
    left: float
    right: float
    lam: float
    n: int

    @property
    def bins(self) -> int:
        return self.heights.size

    @property
    def edges(self) -> np.ndarray:
        return -self.half_width + np.arange(self.bins + 1) * self.width

    @property
    def lo(self) -> float:
        return -self.half_width - (40.0 / self.lam if self.left > 0 else 0.0)

    @property
    def hi(self) -> float:
        return self.half_width + (40.0 / self.lam if self.right > 0 else 0.0)

    def masses(self) -> np.ndarray:
        return self.heights * self.width

    def _tails(self, x):
        L, lam = self.half_width, self.lam
        left = self.left * lam * np.exp(-lam * np.maximum(-x - L, 0.0))
        right = self.right * lam * np.exp(-lam * np.maximum(x - L, 0.0))
        return left, right

    def density(self, x):
        x = np.asarray(x, dtype=float)
        L = self.half_width
        idx = np.clip(unbounded_bin(x, L, self.width), 0, self.bins - 1)
        left, right = self._tails(x)
        return np.where(x < -L, left, np.where(x > L, right, self.heights[idx]))

    def piece_density(self, x, mid):
        L = self.half_width
        left, right = self._tails(x)
        idx = np.clip(np.floor((mid + L) / self.width).astype(np.int64), 0, self.bins - 1)
        return np.where(mid < -L, left, np.where(mid > L, right, self.heights[idx]))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        L, lam = self.half_width, self.lam
        cum = np.concatenate([[0.0], np.cumsum(self.masses())]) + self.left
        t = (np.clip(x, -L, L) + L) / self.width
        k = np.clip(np.floor(t).astype(np.int64), 0, self.bins - 1)
        mid = cum[k] + (t - k) * self.masses()[k]
        v = np.where(
            x < -L,
            self.left * np.exp(-lam * np.maximum(-x - L, 0.0)),
            np.where(x > L, 1.0 - self.right * np.exp(-lam * np.maximum(x - L, 0.0)), mid),
        )
        v = np.clip(v, 0.0, 1.0)
        return float(v) if v.ndim == 0 else v

    def mean(self) -> float:
        mids = self.edges[:-1] + 0.5 * self.width
        tail = self.half_width + 1.0 / self.lam
        return float(np.dot(mids, self.masses()) + (self.right - self.left) * tail)

    def total_mass(self) -> float:
        return float(self.masses().sum() + self.left + self.right)


EstimatedDistribution = EmpiricalPmf | PiecewiseDensity | TailedPiecewiseDensity


# bin geometry ---------------------------------------------------------------------


def bounded_width(n: int, C: float) -> float:
    """Largest power of two ``ell <= 1/2`` with ``C^2 n ell^3 <= 4``.

    This is the state the halving loop reaches after ``n`` observations:
    the width halves while ``sqrt(1 / (4 n ell)) < C ell / 4``.

    Examples:
        >>> bounded_width(10**6, 1.0) == 2.0**-6
        True
    """
    if n < 1:
        raise InsufficientDataError("need at least one observation")
    return _bounded_width(float(n), float(C))


def unbounded_window(n: int, C: float, beta: float, lam: float, delta: float) -> tuple[float, float]:
    """Half-width ``L`` and bin width ``ell`` the doubling and halving loops settle on.

    ``L`` doubles from 1 while ``sqrt(log(1/delta) / (2n)) < (2 beta / lam) e^{-lam L}``;
    then ``ell`` halves from 1/2 while ``sqrt(L / (n ell)) < C L ell / 2``.

    Examples:
        >>> unbounded_window(100, 1.0, 1.0, 1.0, 0.1)[0]
        4.0
    """
    if n < 1:
        raise InsufficientDataError("need at least one observation")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return _unbounded_window(float(n), float(C), float(beta), float(lam), float(delta))


@njit(cache=True)
def _bounded_width(n, C):
    ell = 0.5
    k = 1
    while C * C * n * ell * ell * ell > 4.0 and k < MIN_WIDTH_EXP:
        ell *= 0.5
        k += 1
    return ell


@njit(cache=True)
def _half_width(n, beta, lam, delta):
    L = 1.0
    target = math.sqrt(math.log(1.0 / delta) / (2.0 * n))
    while target < (2.0 * beta / lam) * math.exp(-lam * L):
        L *= 2.0
    return L


@njit(cache=True)
def _unbounded_window(n, C, beta, lam, delta):
    L = _half_width(n, beta, lam, delta)
    ell = 0.5
    k = 1
    while C * C * L * n * ell * ell * ell > 4.0 and k < MIN_WIDTH_EXP:
        ell *= 0.5
        k += 1
    return L, ell


@njit(cache=True)
def _width_holds(a, ell):
    # True iff halving from 1/2 while a * ell^3 > 4 stops exactly at ell
    if not ell <= 0.5:
        return False
    lo = ell == 2.0**-MIN_WIDTH_EXP or not a * ell * ell * ell > 4.0
    up = ell == 0.5 or a * (2.0 * ell) * (2.0 * ell) * (2.0 * ell) > 4.0
    return lo and up


@njit(cache=True)
def _window_holds(L, ell, n, C, beta, lam, delta):
    """True iff :func:`unbounded_window` would return ``(L, ell)``, without running its loops."""
    target = math.sqrt(math.log(1.0 / delta) / (2.0 * n))
    c = 2.0 * beta / lam
    if target < c * math.exp(-lam * L):
        return False
    if L > 1.0 and not target < c * math.exp(-lam * (0.5 * L)):
        return False
    return _width_holds(C * C * L * n, ell)


def bounded_bin(x, width):
    """Zero-based bin of each ``x`` in ``[0, 1]``."""
    return np.maximum(np.ceil(np.asarray(x, dtype=float) / width).astype(np.int64) - 1, 0)


def unbounded_bin(x, L, width):
    """Zero-based interior bin of each ``x`` in ``[-L, L]``."""
    off = int(round(L / width))
    return np.maximum(np.ceil(np.asarray(x, dtype=float) / width).astype(np.int64) + off - 1, 0)


# estimators ------------------------------------------------------------------------


def _as_array(O) -> np.ndarray:
    arr = np.asarray(O, dtype=float).ravel()
    if arr.size == 0:
        raise InsufficientDataError("need at least one observation")
    if not np.all(np.isfinite(arr)):
        raise DataError("observations must be finite")
    return arr


def empirical_pmf(O, S: Optional[Sequence] = None) -> EmpiricalPmf:
    """Frequencies of the observations.

    Args:
        O: Observations.
        S: Declared finite support. When omitted, the observations must be
            nonnegative integers and the support is ``{0, ..., max(O)}``.

    Raises:
        DataError: if an observation lies outside the support.

    Examples:
        >>> empirical_pmf([0, 0, 1], S=[0, 1, 2]).probs.tolist()
        [0.6666666666666666, 0.3333333333333333, 0.0]
    """
    if S is not None and len(S) and not all(isinstance(s, (int, float, np.integer, np.floating)) for s in S):
        return _label_pmf(O, S)
    arr = _as_array(O)
    n = arr.size
    if S is None:
        if np.any(arr < 0) or np.any(arr != np.floor(arr)):
            raise DataError("countable-support observations must be nonnegative integers")
        counts = np.bincount(arr.astype(np.int64))
        return EmpiricalPmf(np.arange(counts.size, dtype=float), counts / n, n)
    sup = np.asarray(S, dtype=float)
    order = np.argsort(sup, kind="stable")
    sup = sup[order]
    idx = np.searchsorted(sup, arr)
    ok = (idx < sup.size) & (sup[np.minimum(idx, sup.size - 1)] == arr)
    if not ok.all():
        raise DataError(f"observation {arr[~ok][0]!r} is outside the declared support")
    counts = np.bincount(idx, minlength=sup.size)
    return EmpiricalPmf(sup, counts / n, n)


def _label_pmf(O, S):
    # non-numeric labels keep the declared order
    pos = {s: i for i, s in enumerate(S)}
    counts = np.zeros(len(S))
    n = 0
    for o in O:
        if o not in pos:
            raise DataError(f"observation {o!r} is outside the declared support")
        counts[pos[o]] += 1
        n += 1
    if n == 0:
        raise InsufficientDataError("need at least one observation")
    return EmpiricalPmf(np.asarray(S, dtype=object), counts / n, n)


def binned_density(O, C: float) -> PiecewiseDensity:
    """Histogram density on ``[0, 1]`` with width :func:`bounded_width`.

    Raises:
        DataError: if an observation falls outside ``[0, 1]``.
    """
    arr = _as_array(O)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DataError("observations must lie in [0, 1]")
    width = bounded_width(arr.size, C)
    return _bounded_from_counts(_bounded_counts(arr, width), width, arr.size)


def _bounded_counts(arr, width):
    bins = int(round(1.0 / width))
    return np.bincount(bounded_bin(arr, width), minlength=bins)


def _bounded_from_counts(counts, width, n):
    return PiecewiseDensity(width, counts / (width * n), n)


def unbounded_density(O, C: float, beta: float, lam: float, delta: float) -> TailedPiecewiseDensity:
    """Histogram on ``[-L, L]`` with exponential tails; window from :func:`unbounded_window`."""
    arr = _as_array(O)
    L, width = unbounded_window(arr.size, C, beta, lam, delta)
    counts, left, right = _unbounded_counts(arr, L, width)
    return _tailed_from_counts(counts, left, right, L, width, lam, arr.size)


def _unbounded_counts(arr, L, width):
    bins = int(round(2.0 * L / width))
    lo = arr < -L
    hi = arr > L
    inner = arr[~(lo | hi)]
    counts = np.bincount(unbounded_bin(inner, L, width), minlength=bins)
    return counts, int(lo.sum()), int(hi.sum())


def _tailed_from_counts(counts, left, right, L, width, lam, n):
    return TailedPiecewiseDensity(L, width, counts / (width * n), left / n, right / n, float(lam), n)


def sample_moments(O) -> tuple[float, float]:
    """Sample mean and unbiased variance, accumulated in observation order."""
    arr = _as_array(O)
    if arr.size < 2:
        raise InsufficientDataError("need at least two observations for a variance")
    st = np.array([math.nan, 0.0, 0.0])
    _accumulate(arr, st)
    return _moments(st, arr.size)


@njit(cache=True)
def _accumulate(xs, st):
    # st = (shift, s1, s2); the shift is the first value ever seen
    for x in xs:
        if st[0] != st[0]:
            st[0] = x
        d = x - st[0]
        st[1] += d
        st[2] += d * d


def _moments(st, n):
    shift, s1, s2 = float(st[0]), float(st[1]), float(st[2])
    mu = shift + s1 / n
    var = max((s2 - s1 * s1 / n) / (n - 1), 0.0) if n > 1 else math.nan
    return mu, var


# observation store ---------------------------------------------------------------------

EST_RAW = 0
EST_FINITE = 1
EST_COUNTABLE = 2
EST_BOUNDED = 3
EST_UNBOUNDED = 4

# push status codes
PUSH_OK = 0
PUSH_OUTSIDE = 1
PUSH_GROW = 2

# layout of the integer and float state vectors
I_N, I_KIND = 0, 1
F_SHIFT, F_S1, F_S2, F_L, F_W = 0, 1, 2, 3, 4


@njit(cache=True)
def push_span(buf, ist, fst, counts, tails, support, xs, lo, hi):
    """Append ``xs[lo:hi]`` and update sums and counts at the current key.

    Returns the index of the first value not appended and a ``PUSH_*``
    status. The loop body lives here rather than in a per-value helper
    because passing arrays to a compiled call costs more than the update.
    """
    kind = ist[I_KIND]
    w = fst[F_W]
    L = fst[F_L]
    off = int(L / w) if w > 0.0 else 0
    for i in range(lo, hi):
        x = xs[i]
        n = ist[I_N]
        if kind == EST_FINITE:
            j = np.searchsorted(support, x)
            if j >= support.size or support[j] != x:
                return i, PUSH_OUTSIDE
            counts[j] += 1
        elif kind == EST_COUNTABLE:
            if x < 0.0 or x != math.floor(x):
                return i, PUSH_OUTSIDE
            j = int(x)
            if j >= counts.size:
                return i, PUSH_GROW
            counts[j] += 1
        elif kind == EST_BOUNDED:
            if not (0.0 <= x <= 1.0):
                return i, PUSH_OUTSIDE
            if w > 0.0:
                j = int(math.ceil(x / w)) - 1
                if j < 0:
                    j = 0
                counts[j] += 1
        elif kind == EST_UNBOUNDED:
            if w > 0.0:
                if x < -L:
                    tails[0] += 1
                elif x > L:
                    tails[1] += 1
                else:
                    j = int(math.ceil(x / w)) + off - 1
                    if j < 0:
                        j = 0
                    counts[j] += 1
        if n < buf.size:
            buf[n] = x
        if n == 0:
            fst[F_SHIFT] = x
        d = x - fst[F_SHIFT]
        fst[F_S1] += d
        fst[F_S2] += d * d
        ist[I_N] = n + 1
    return hi, PUSH_OK


@njit(cache=True)
def push_many(buf, ist, fst, counts, tails, support, xs):
    return push_span(buf, ist, fst, counts, tails, support, xs, 0, xs.size)


class ObservationStore:
    """Growing record of one arm's observations.

    Keeps every raw value, running shifted sums for the mean and variance,
    and bin counts for the estimator's current bin layout (its *key*). When
    the required key changes, counts are rebuilt from the raw values; in
    between, each new observation updates them in O(1).

    Args:
        kind: One of the ``EST_*`` codes.
        support: Sorted numeric support for ``EST_FINITE``.
        C: Density smoothness constant (binned kinds).
        beta: Tail envelope scale (``EST_UNBOUNDED``).
        lam: Tail envelope rate (``EST_UNBOUNDED``).
        capacity: Initial raw-value capacity.
        keep_raw: When False only sums and counts are kept, so the layout
            must be fixed with :meth:`rekey` before the first observation
            and cannot change afterwards.
    """

    def __init__(
        self,
        kind: int,
        support=None,
        C: float = 0.0,
        beta: float = 0.0,
        lam: float = 0.0,
        capacity: int = 1024,
        keep_raw: bool = True,
    ):
        self.kind = int(kind)
        self.C, self.beta, self.lam = float(C), float(beta), float(lam)
        self.keep_raw = bool(keep_raw)
        self.buf = np.empty(max(int(capacity), 16) if keep_raw else 0)
        self.ist = np.zeros(2, dtype=np.int64)
        self.ist[I_KIND] = self.kind
        self.fst = np.zeros(5)
        self.fst[F_SHIFT] = math.nan
        self.tails = np.zeros(2, dtype=np.int64)
        if self.kind == EST_FINITE:
            sup = np.unique(np.asarray(support, dtype=float))
            if sup.size != len(support):
                raise DataError("support values must be distinct")
            self.support = sup
            self.counts = np.zeros(sup.size, dtype=np.int64)
        else:
            self.support = np.empty(0)
            self.counts = np.zeros(64 if self.kind == EST_COUNTABLE else 0, dtype=np.int64)

    @property
    def n(self) -> int:
        return int(self.ist[I_N])

    @property
    def values(self) -> np.ndarray:
        if not self.keep_raw:
            raise DataError("this store does not keep raw observations")
        return self.buf[: self.n]

    def reserve(self, extra: int) -> None:
        if not self.keep_raw:
            return
        need = self.n + int(extra)
        if need > self.buf.size:
            new = np.empty(max(need, 2 * self.buf.size))
            new[: self.n] = self.buf[: self.n]
            self.buf = new

    def extend(self, xs) -> None:
        xs = np.ascontiguousarray(xs, dtype=float)
        self.reserve(xs.size)
        done = 0
        while done < xs.size:
            k, status = push_many(self.buf, self.ist, self.fst, self.counts, self.tails, self.support, xs[done:])
            done += k
            if status == PUSH_GROW:
                self.grow_counts(int(xs[done]))
            elif status == PUSH_OUTSIDE:
                raise DataError(f"observation {xs[done]!r} is outside the declared support")

    def grow_counts(self, value: int) -> None:
        size = max(value + 1, 2 * self.counts.size)
        new = np.zeros(size, dtype=np.int64)
        new[: self.counts.size] = self.counts
        self.counts = new

    # keys and rebuilding

    def key_for(self, delta: float, n: int | None = None) -> tuple[float, float]:
        """The ``(L, ell)`` layout the estimator needs at level ``delta``; zeros if unbinned.

        ``n`` defaults to the current number of observations.
        """
        n = max(self.n if n is None else int(n), 1)
        if self.kind == EST_BOUNDED:
            return 0.0, _bounded_width(float(n), self.C)
        if self.kind == EST_UNBOUNDED:
            return _unbounded_window(float(n), self.C, self.beta, self.lam, float(delta))
        return 0.0, 0.0

    @property
    def key(self) -> tuple[float, float]:
        return float(self.fst[F_L]), float(self.fst[F_W])

    def rekey(self, key: tuple[float, float]) -> None:
        """Rebuild the bin counts for layout ``key`` from the raw values."""
        L, w = key
        if not self.keep_raw and self.n > 0:
            if (L, w) == self.key:
                return
            raise DataError("cannot change the layout without raw observations")
        vals = self.buf[: self.n]
        if self.kind == EST_BOUNDED:
            self.counts = _bounded_counts(vals, w).astype(np.int64)
        elif self.kind == EST_UNBOUNDED:
            c, lo, hi = _unbounded_counts(vals, L, w)
            self.counts = c.astype(np.int64)
            self.tails[:] = (lo, hi)
        else:
            return
        self.fst[F_L] = L
        self.fst[F_W] = w

    def ensure_key(self, delta: float) -> bool:
        """Switch to the layout required at ``delta``; True if it changed."""
        key = self.key_for(delta)
        if key != self.key:
            self.rekey(key)
            return True
        return False

    # estimates

    def moments(self) -> tuple[float, float]:
        """Running mean and unbiased variance (variance is nan below two observations)."""
        if self.n == 0:
            raise InsufficientDataError("no observations yet")
        return _moments(self.fst, self.n)

    def estimate(self, delta: float = 0.5):
        """The estimator's output for the current observations at level ``delta``."""
        n = self.n
        if n == 0:
            raise InsufficientDataError("no observations yet")
        if self.kind == EST_FINITE:
            return EmpiricalPmf(self.support, self.counts / n, n)
        if self.kind == EST_COUNTABLE:
            top = int(np.flatnonzero(self.counts)[-1]) + 1
            return EmpiricalPmf(np.arange(top, dtype=float), self.counts[:top] / n, n)
        if self.kind == EST_RAW:
            vals, counts = np.unique(self.values, return_counts=True)
            return EmpiricalPmf(vals, counts / n, n)
        self.ensure_key(delta)
        L, w = self.key
        if self.kind == EST_BOUNDED:
            return _bounded_from_counts(self.counts, w, n)
        return _tailed_from_counts(self.counts, int(self.tails[0]), int(self.tails[1]), L, w, self.lam, n)


def estimate_reward(O, reward, case, delta: float = 0.5) -> float:
    """Apply ``reward`` to the estimate the case prescribes for observations ``O``.

    Args:
        O: Observations of one arm.
        reward: A :class:`purex.rewards.RewardSpec`.
        case: The :class:`purex.confidence.ConfidenceCase` naming the estimator.
        delta: Confidence level handed to level-dependent estimators.

    Raises:
        ConfigError: if the reward and case do not fit together.
    """
    from purex.rewards import estimate_from_observations

    return estimate_from_observations(reward, case, O, delta)
