"""Arm distributions: ground truth for simulation and targets for rewards.

Five variants are supported. Discrete arms carry a support and a probability
vector (finite case) or a pmf over the nonnegative integers with tail
constants (countable case). Continuous arms carry a vectorised density with
its declared smoothness constant ``C`` and, on the real line, exponential
tail constants ``beta`` and ``lam``. Gaussians are a separate closed-form
variant.

Declared constants are trusted by the estimators but can be checked with
:func:`validate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import optimize, special

from purex.errors import ConfigError, VariantMismatchError
from purex.quadrature import adaptive_simpson

SQRT2PI = math.sqrt(2.0 * math.pi)
# mass beyond this many envelope decay lengths is treated as zero
TAIL_DECAYS = 40.0
_PROB_TOL = 1e-12


@dataclass(frozen=True)
class RandomSource:
    """A seeded stream of randomness.

    The pair ``(seed, stream)`` fully determines the generator, and distinct
    streams under the same seed are independent.

    Attributes:
        seed: 64-bit integer seed.
        stream: Tuple of nonnegative integers, e.g. ``(arm,)``.
    """

    seed: int
    stream: tuple = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=tuple(int(s) for s in self.stream))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RandomSource":
        return RandomSource(self.seed, tuple(self.stream) + tuple(int(k) for k in key))


def _check_probs(p, path="probs"):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ConfigError("probability vector must be a nonempty list", path)
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ConfigError("probabilities must be finite and nonnegative", path)
    if abs(p.sum() - 1.0) > _PROB_TOL:
        raise ConfigError(f"probabilities sum to {p.sum()!r}, not 1", path)
    return p


@dataclass(frozen=True, eq=False)
class DiscreteFinite:
    """Distribution over an ordered finite list of labels."""

    support: tuple
    probs: np.ndarray
    name: str = "categorical"

    def __post_init__(self):
        sup = tuple(self.support)
        if len(set(sup)) != len(sup):
            raise ConfigError("support labels must be distinct", "support")
        p = _check_probs(self.probs)
        if p.size != len(sup):
            raise ConfigError("support and probability vector differ in length", "probs")
        p.setflags(write=False)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "probs", p)

    @property
    def numeric(self) -> bool:
        return all(isinstance(s, (int, float, np.integer, np.floating)) and not isinstance(s, bool) for s in self.support)

    def values(self) -> np.ndarray:
        if not self.numeric:
            raise VariantMismatchError("support labels are not numeric")
        return np.asarray(self.support, dtype=float)


@dataclass(frozen=True, eq=False)
class DiscreteCountable:
    """Distribution over ``{0, 1, 2, ...}`` with ``pmf(z) <= beta * exp(-lam * z)``."""

    pmf: Callable[[np.ndarray], np.ndarray]
    beta: float
    lam: float
    name: str = "countable"

    def __post_init__(self):
        if not (self.beta > 0 and self.lam > 0):
            raise ConfigError("beta and lam must be positive", "beta")

    def horizon(self, tail: float = 1e-17) -> int:
        """First ``z`` beyond which the envelope leaves less than ``tail`` mass."""
        # sum_{k >= z} beta e^{-lam k} = beta e^{-lam z} / (1 - e^{-lam})
        q = -math.expm1(-self.lam)
        z = math.log(self.beta / (q * tail)) / self.lam
        return max(1, int(math.ceil(z)))

    def table(self) -> np.ndarray:
        z = np.arange(self.horizon() + 1, dtype=float)
        return np.asarray(self.pmf(z), dtype=float)


@dataclass(frozen=True, eq=False)
class ContinuousBounded:
    """Density on ``[0, 1]`` with ``|d(x) - d(y)| <= 2C|x - y|``."""

    density: Callable[[np.ndarray], np.ndarray]
    C: float
    cdf_fn: Optional[Callable] = None
    ppf_fn: Optional[Callable] = None
    name: str = "bounded"

    def __post_init__(self):
        if not self.C >= 0:
            raise ConfigError("C must be nonnegative", "C")


@dataclass(frozen=True, eq=False)
class ContinuousUnbounded:
    """Density on the real line with smoothness ``C`` and tail envelope ``beta e^{-lam|z|}``."""

    density: Callable[[np.ndarray], np.ndarray]
    C: float
    beta: float
    lam: float
    cdf_fn: Optional[Callable] = None
    ppf_fn: Optional[Callable] = None
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None
    mean_value: Optional[float] = None
    var_value: Optional[float] = None
    breaks: tuple = ()
    name: str = "unbounded"

    def __post_init__(self):
        if not (self.C >= 0 and self.beta > 0 and self.lam > 0):
            raise ConfigError("need C >= 0 and beta, lam > 0", "C")

    @property
    def reach(self) -> float:
        """Half-width beyond which the envelope leaves negligible mass."""
        return max(1.0, math.log(max(self.beta, 1e-300) / self.lam) / self.lam) + TAIL_DECAYS / self.lam


@dataclass(frozen=True)
class Gaussian:
    """Normal distribution with mean ``mu`` and variance ``var``."""

    mu: float
    var: float
    name: str = "gaussian"

    def __post_init__(self):
        if not (self.var > 0 and math.isfinite(self.var) and math.isfinite(self.mu)):
            raise ConfigError("Gaussian needs finite mu and positive variance", "var")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var)

    @property
    def C(self) -> float:
        # max |phi'| = 1 / (var sqrt(2 pi e)), and the constant is half the slope
        return 1.0 / (2.0 * self.var * math.sqrt(2.0 * math.pi * math.e))

    def envelope_beta(self, lam: float) -> float:
        """Smallest ``beta`` with ``pdf(z) <= beta e^{-lam|z|}`` for all ``z``."""
        s2 = self.var
        # sup_z of log pdf + lam |z| is reached at z = mu + sign * lam * s2
        best = -math.inf
        for sign in (-1.0, 1.0):
            z = self.mu + sign * lam * s2
            if sign * z < 0:
                z = 0.0
            best = max(best, -((z - self.mu) ** 2) / (2 * s2) + lam * abs(z))
        return math.exp(best) / math.sqrt(2 * math.pi * s2)


ArmDistribution = Union[DiscreteFinite, DiscreteCountable, ContinuousBounded, ContinuousUnbounded, Gaussian]
CONTINUOUS = (ContinuousBounded, ContinuousUnbounded, Gaussian)
DISCRETE = (DiscreteFinite, DiscreteCountable)


# sampling -------------------------------------------------------------------


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, RandomSource):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be a RandomSource or numpy Generator")


def _inverse_table(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, cum.size - 1)


def sample(dist: ArmDistribution, rng, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. observations.

    Args:
        dist: The arm distribution.
        rng: A :class:`RandomSource` (a fresh generator is built from it) or
            a live numpy ``Generator`` (advanced in place).
        n: Number of draws.

    Returns:
        Array of length ``n``. Finite discrete arms with non-numeric labels
        return an object array of labels.

    Examples:
        >>> sample(categorical(["a"], [1.0]), RandomSource(0), 3).tolist()
        ['a', 'a', 'a']
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    g = _rng(rng)
    if isinstance(dist, Gaussian):
        return dist.mu + dist.sigma * g.standard_normal(n)
    if isinstance(dist, DiscreteFinite):
        cum = np.cumsum(dist.probs)
        idx = _inverse_table(cum, g.random(n))
        idx = _skip_zero(idx, dist.probs)
        labels = np.asarray(dist.support, dtype=float if dist.numeric else object)
        return labels[idx]
    if isinstance(dist, DiscreteCountable):
        tab = dist.table()
        cum = np.cumsum(tab)
        u = g.random(n)
        idx = np.searchsorted(cum, u, side="right")
        over = idx >= cum.size
        if over.any():
            idx[over] = [_countable_far(dist, cum[-1], x) for x in u[over]]
        return idx.astype(float)
    if isinstance(dist, ContinuousBounded):
        if dist.ppf_fn is not None:
            return np.asarray(dist.ppf_fn(g.random(n)), dtype=float)
        return _rejection(dist.density, g, n, lambda k: g.random(k), _bounded_sup(dist), lambda x: 1.0)
    if isinstance(dist, ContinuousUnbounded):
        if dist.sampler is not None:
            return np.asarray(dist.sampler(g, n), dtype=float)
        if dist.ppf_fn is not None:
            return np.asarray(dist.ppf_fn(g.random(n)), dtype=float)
        lam, beta = dist.lam, dist.beta
        # proposal: Laplace(0, 1/lam), whose density times 2 beta / lam is the envelope
        return _rejection(
            dist.density,
            g,
            n,
            lambda k: g.laplace(0.0, 1.0 / lam, k),
            2.0 * beta / lam,
            lambda x: 0.5 * lam * np.exp(-lam * np.abs(x)),
        )
    raise VariantMismatchError(f"unknown distribution type {type(dist).__name__}")


def _skip_zero(idx, probs):
    # rounding can leave u above the last cumulative value, or land on trailing zero-mass labels
    return np.minimum(idx, np.flatnonzero(probs > 0)[-1])


def _countable_far(dist, cum_end, u):
    z = dist.horizon()
    c = cum_end
    while c <= u:
        z += 1
        c += float(dist.pmf(np.array([float(z)]))[0])
        if z > 10 * dist.horizon() + 10**6:
            break
    return z


def _bounded_sup(dist: ContinuousBounded) -> float:
    x = np.linspace(0.0, 1.0, 1025)
    d = np.asarray(dist.density(x), dtype=float)
    # between grid points the density can exceed the grid max by at most C times the spacing
    return float(d.max()) + 2.0 * dist.C * (x[1] - x[0]) + 1e-12


def _rejection(density, g, n, propose, scale, proposal_pdf):
    out = np.empty(n)
    filled = 0
    while filled < n:
        k = max(64, int(1.3 * (n - filled) * max(scale, 1.0)))
        x = propose(k)
        u = g.random(k)
        acc = x[u * scale * proposal_pdf(x) <= density(x)]
        take = min(acc.size, n - filled)
        out[filled : filled + take] = acc[:take]
        filled += take
    return out


# exact queries ----------------------------------------------------------------


def density(dist: ArmDistribution, x):
    """Density at ``x``; defined for continuous variants only."""
    if isinstance(dist, DISCRETE):
        raise VariantMismatchError("density is not defined for a discrete distribution")
    xs = np.asarray(x, dtype=float)
    if isinstance(dist, Gaussian):
        v = np.exp(-((xs - dist.mu) ** 2) / (2 * dist.var)) / math.sqrt(2 * math.pi * dist.var)
    elif isinstance(dist, ContinuousBounded):
        v = np.where((xs >= 0) & (xs <= 1), np.asarray(dist.density(np.clip(xs, 0, 1)), dtype=float), 0.0)
    else:
        v = np.asarray(dist.density(xs), dtype=float)
    return float(v) if np.ndim(x) == 0 else v


def _cdf_by_quadrature(fn, lo, xs, breaks=()):
    order = np.argsort(xs)
    sx = xs[order]
    out = np.empty_like(sx)
    acc = 0.0
    prev = lo
    for i, v in enumerate(sx):
        if v <= lo:
            out[i] = 0.0
            continue
        edges = np.unique(np.concatenate([[prev], [b for b in breaks if prev < b < v], np.linspace(prev, v, 9)]))
        acc += adaptive_simpson(fn, edges, tol=1e-12).value
        out[i] = acc
        prev = v
    res = np.empty_like(out)
    res[order] = out
    return np.clip(res, 0.0, 1.0)


def cdf(dist: ArmDistribution, x):
    """``P[X <= x]`` (right-continuous)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if isinstance(dist, Gaussian):
        v = special.ndtr((xs - dist.mu) / dist.sigma)
    elif isinstance(dist, DiscreteFinite):
        vals = dist.values()
        order = np.argsort(vals, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(dist.probs[order])])
        v = np.minimum(cum[np.searchsorted(vals[order], xs, side="right")], 1.0)
    elif isinstance(dist, DiscreteCountable):
        tab = np.cumsum(dist.table())
        k = np.floor(xs)
        v = np.where(k < 0, 0.0, tab[np.clip(k, 0, tab.size - 1).astype(int)])
        v = np.minimum(v, 1.0)
    elif dist.cdf_fn is not None:
        v = np.asarray(dist.cdf_fn(xs), dtype=float)
    elif isinstance(dist, ContinuousBounded):
        v = _cdf_by_quadrature(lambda t: density(dist, t), 0.0, np.clip(xs, 0.0, 1.0))
        v = np.where(xs >= 1.0, 1.0, v)
    else:
        v = _cdf_by_quadrature(dist.density, -dist.reach, xs, dist.breaks)
    return float(v[0]) if np.ndim(x) == 0 else v


def true_quantile(dist: ArmDistribution, tau: float) -> float:
    """``inf{x : cdf(x) >= tau}``.

    Examples:
        >>> true_quantile(categorical([0, 1], [0.3, 0.7]), 0.3)
        0.0
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    if isinstance(dist, Gaussian):
        return float(dist.mu + dist.sigma * special.ndtri(tau))
    if isinstance(dist, DiscreteFinite):
        vals = dist.values()
        order = np.argsort(vals, kind="stable")
        cum = np.cumsum(dist.probs[order])
        i = int(np.searchsorted(cum, tau - 1e-15, side="left"))
        return float(vals[order][min(i, vals.size - 1)])
    if isinstance(dist, DiscreteCountable):
        cum = np.cumsum(dist.table())
        return float(min(int(np.searchsorted(cum, tau - 1e-15, side="left")), cum.size - 1))
    if dist.ppf_fn is not None:
        return float(dist.ppf_fn(np.array([tau]))[0])
    if isinstance(dist, ContinuousBounded):
        lo, hi = 0.0, 1.0
    else:
        lo, hi = -dist.reach, dist.reach
    return float(optimize.brentq(lambda t: cdf(dist, t) - tau, lo, hi, xtol=1e-13))


def mean(dist: ArmDistribution) -> float:
    """Expected value."""
    if isinstance(dist, Gaussian):
        return dist.mu
    if isinstance(dist, DiscreteFinite):
        return float(np.dot(dist.values(), dist.probs))
    if isinstance(dist, DiscreteCountable):
        tab = dist.table()
        return float(np.dot(np.arange(tab.size), tab))
    if isinstance(dist, ContinuousUnbounded) and dist.mean_value is not None:
        return float(dist.mean_value)
    return _moment(dist, lambda x: x)


def variance(dist: ArmDistribution) -> float:
    """Variance."""
    if isinstance(dist, Gaussian):
        return dist.var
    if isinstance(dist, ContinuousUnbounded) and dist.var_value is not None:
        return float(dist.var_value)
    mu = mean(dist)
    if isinstance(dist, DiscreteFinite):
        return float(np.dot((dist.values() - mu) ** 2, dist.probs))
    if isinstance(dist, DiscreteCountable):
        tab = dist.table()
        return float(np.dot((np.arange(tab.size) - mu) ** 2, tab))
    return _moment(dist, lambda x: (x - mu) ** 2)


def _moment(dist, g):
    if isinstance(dist, ContinuousBounded):
        return adaptive_simpson(lambda x: g(x) * density(dist, x), np.linspace(0, 1, 33), tol=1e-12).value
    r = dist.reach
    edges = np.unique(np.concatenate([np.linspace(-r, r, 257), np.asarray(dist.breaks, dtype=float)]))
    return adaptive_simpson(lambda x: g(x) * dist.density(x), edges, tol=1e-11).value


def total_mass(dist: ArmDistribution) -> float:
    """Integral of the density or sum of the pmf under the module's quadrature."""
    if isinstance(dist, DiscreteFinite):
        return float(dist.probs.sum())
    if isinstance(dist, DiscreteCountable):
        return float(dist.table().sum())
    if isinstance(dist, Gaussian):
        return 1.0
    return _moment(dist, lambda x: np.ones_like(x))


# validation -------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    assumption: str
    point: float
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`; ``violations`` is empty when it passes."""

    violations: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def validate(
    dist: ArmDistribution,
    probe_points: int = 1024,
    *,
    C: float | None = None,
    beta: float | None = None,
    lam: float | None = None,
) -> ValidationReport:
    """Check declared constants on a deterministic probe grid.

    Keyword constants override the ones carried by ``dist``, which lets a
    Gaussian arm be checked against a case's ``(C, beta, lam)``.

    Bounded densities are probed on an even grid over ``[0, 1]``;
    unbounded ones at quantile-spaced points. Each failed check is reported
    with the first point that witnesses it.

    Examples:
        >>> validate(polynomial(1), C=0.5).passed
        False
    """
    if probe_points < 2:
        raise ValueError("probe_points must be at least 2")
    out: list[Violation] = []

    def slope_check(x, d, c):
        if c is None:
            return
        dx = np.diff(x)
        ok = dx > 0
        q = np.abs(np.diff(d))[ok] / dx[ok]
        bad = np.flatnonzero(q > 2.0 * c * (1 + 1e-9) + 1e-12)
        if bad.size:
            i = bad[0]
            out.append(Violation("smoothness", float(x[:-1][ok][i]), f"difference quotient {q[i]:.6g} > 2C = {2 * c:.6g}"))

    def envelope_check(z, d, b, l, absolute):
        if b is None or l is None:
            return
        env = b * np.exp(-l * (np.abs(z) if absolute else z))
        bad = np.flatnonzero(d > env * (1 + 1e-9) + 1e-15)
        if bad.size:
            i = bad[0]
            out.append(Violation("tail envelope", float(z[i]), f"value {d[i]:.6g} > envelope {env[i]:.6g}"))

    def mass_check(total, tol):
        if abs(total - 1.0) > tol:
            out.append(Violation("normalisation", math.nan, f"total mass {total!r}"))

    if isinstance(dist, DiscreteFinite):
        mass_check(float(dist.probs.sum()), _PROB_TOL)
    elif isinstance(dist, DiscreteCountable):
        tab = dist.table()
        if np.any(tab < 0):
            z = int(np.flatnonzero(tab < 0)[0])
            out.append(Violation("nonnegativity", float(z), "negative pmf"))
        z = np.arange(tab.size, dtype=float)
        envelope_check(z, tab, beta if beta is not None else dist.beta, lam if lam is not None else dist.lam, False)
        mass_check(float(tab.sum()), 1e-9)
    elif isinstance(dist, ContinuousBounded):
        x = np.linspace(0.0, 1.0, probe_points)
        d = density(dist, x)
        if np.any(d < 0):
            out.append(Violation("nonnegativity", float(x[np.argmax(d < 0)]), "negative density"))
        slope_check(x, d, C if C is not None else dist.C)
        mass_check(total_mass(dist), 1e-6)
    else:
        u = (np.arange(probe_points) + 0.5) / probe_points
        if isinstance(dist, Gaussian):
            z = dist.mu + dist.sigma * special.ndtri(u)
            mass = 1.0
        else:
            z = np.array(sorted({true_quantile(dist, float(t)) for t in u}))
            mass = total_mass(dist)
        d = density(dist, z)
        if np.any(d < 0):
            out.append(Violation("nonnegativity", float(z[np.argmax(d < 0)]), "negative density"))
        c = C if C is not None else getattr(dist, "C", None)
        slope_check(z, d, c)
        b = beta if beta is not None else getattr(dist, "beta", None)
        l = lam if lam is not None else getattr(dist, "lam", None)
        envelope_check(z, d, b, l, True)
        mass_check(mass, 1e-6)
    return ValidationReport(tuple(out))


# presets ----------------------------------------------------------------------


def bernoulli(p: float) -> DiscreteFinite:
    if not 0.0 <= p <= 1.0:
        raise ConfigError("p must lie in [0, 1]", "p")
    return DiscreteFinite((0, 1), np.array([1.0 - p, p]), name=f"bernoulli({p})")


def categorical(support, probs) -> DiscreteFinite:
    return DiscreteFinite(tuple(support), np.asarray(probs, dtype=float), name="categorical")


def geometric(q: float) -> DiscreteCountable:
    """``P[Z = z] = (1 - q) q^z`` on ``{0, 1, ...}``; envelope ``beta = 1``, ``lam = -log q``."""
    if not 0.0 < q < 1.0:
        raise ConfigError("q must lie in (0, 1)", "q")
    return DiscreteCountable(lambda z: (1.0 - q) * np.power(q, z), beta=1.0, lam=-math.log(q), name=f"geometric({q})")


def uniform() -> ContinuousBounded:
    return ContinuousBounded(lambda x: np.ones_like(np.asarray(x, dtype=float)), C=0.0, cdf_fn=lambda x: np.clip(x, 0.0, 1.0), ppf_fn=lambda u: np.asarray(u, dtype=float), name="uniform")


def polynomial(k: float) -> ContinuousBounded:
    """Density ``(k + 1) x^k`` on ``[0, 1]`` for ``k >= 1``; slope at most ``k (k + 1)``."""
    if k < 1:
        raise ConfigError("polynomial degree must be at least 1", "k")
    k = float(k)
    return ContinuousBounded(
        lambda x: (k + 1.0) * np.power(np.clip(x, 0.0, 1.0), k),
        C=k * (k + 1.0) / 2.0,
        cdf_fn=lambda x: np.power(np.clip(x, 0.0, 1.0), k + 1.0),
        ppf_fn=lambda u: np.power(np.asarray(u, dtype=float), 1.0 / (k + 1.0)),
        name=f"polynomial({k:g})",
    )


def triangular(mode: float = 0.5) -> ContinuousBounded:
    """Triangular density on ``[0, 1]`` peaking at ``mode``."""
    c = float(mode)
    if not 0.0 < c < 1.0:
        raise ConfigError("mode must lie in (0, 1)", "mode")

    def d(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return np.where(x <= c, 2.0 * x / c, 2.0 * (1.0 - x) / (1.0 - c))

    def F(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return np.where(x <= c, x * x / c, 1.0 - (1.0 - x) ** 2 / (1.0 - c))

    def Q(u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= c, np.sqrt(u * c), 1.0 - np.sqrt((1.0 - u) * (1.0 - c)))

    slope = max(2.0 / c, 2.0 / (1.0 - c))
    return ContinuousBounded(d, C=slope / 2.0, cdf_fn=F, ppf_fn=Q, name=f"triangular({c:g})")


def gaussian(mu: float, var: float) -> Gaussian:
    return Gaussian(float(mu), float(var))


def laplace(mu: float, b: float) -> ContinuousUnbounded:
    """Laplace(mu, b): ``C = 1/(4 b^2)``, ``lam = 1/b``, ``beta = e^{|mu|/b} / (2b)``."""
    if not b > 0:
        raise ConfigError("scale b must be positive", "b")
    mu, b = float(mu), float(b)

    def d(x):
        return np.exp(-np.abs(np.asarray(x, dtype=float) - mu) / b) / (2.0 * b)

    def F(x):
        t = (np.asarray(x, dtype=float) - mu) / b
        return np.where(t < 0, 0.5 * np.exp(np.minimum(t, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(t, 0.0)))

    def Q(u):
        u = np.asarray(u, dtype=float)
        return np.where(u < 0.5, mu + b * np.log(2.0 * u), mu - b * np.log(2.0 * (1.0 - u)))

    return ContinuousUnbounded(
        d,
        C=1.0 / (4.0 * b * b),
        beta=math.exp(abs(mu) / b) / (2.0 * b),
        lam=1.0 / b,
        cdf_fn=F,
        ppf_fn=Q,
        sampler=lambda g, n: g.laplace(mu, b, n),
        mean_value=mu,
        var_value=2.0 * b * b,
        breaks=(mu,),
        name=f"laplace({mu:g},{b:g})",
    )


def gaussian_mixture(weights, means, variances, lam: float = 1.0) -> ContinuousUnbounded:
    """Finite mixture of Gaussians.

    ``C`` is computed from the exact derivative on a fine grid and ``beta``
    from the exact per-component envelope maxima, so both are valid for the
    chosen tail rate ``lam``.
    """
    w = _check_probs(weights, "weights")
    mu = np.asarray(means, dtype=float)
    v = np.asarray(variances, dtype=float)
    if not (w.size == mu.size == v.size):
        raise ConfigError("weights, means and variances differ in length", "weights")
    if np.any(v <= 0):
        raise ConfigError("variances must be positive", "variances")
    sd = np.sqrt(v)
    comps = [Gaussian(float(m), float(s2)) for m, s2 in zip(mu, v)]

    def d(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w * np.exp(-((x - mu) ** 2) / (2 * v)) / np.sqrt(2 * np.pi * v), axis=-1)

    def F(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w * special.ndtr((x - mu) / sd), axis=-1)

    def draw(g, n):
        u = g.random(n)
        z = g.standard_normal(n)
        k = np.minimum(np.searchsorted(np.cumsum(w), u, side="right"), w.size - 1)
        return mu[k] + sd[k] * z

    # derivative bound: sum of component maxima is always safe; refine on a grid
    lo, hi = float(np.min(mu - 12 * sd)), float(np.max(mu + 12 * sd))
    grid = np.linspace(lo, hi, 200_001)
    xg = grid[:, None]
    deriv = np.sum(-w * (xg - mu) / v * np.exp(-((xg - mu) ** 2) / (2 * v)) / np.sqrt(2 * np.pi * v), axis=-1)
    # second derivatives bound how far the true max exceeds the grid max
    curv = float(np.sum(w / (v * np.sqrt(2 * np.pi * v)) * 2.0))
    slope = float(np.max(np.abs(deriv))) + curv * (grid[1] - grid[0])
    C = min(slope, float(np.sum([wi * 2 * c.C for wi, c in zip(w, comps)]))) / 2.0
    beta = float(np.sum([wi * c.envelope_beta(lam) for wi, c in zip(w, comps)]))
    # the components peak on different sides, so the grid maximum of d(z) e^{lam|z|} is much tighter
    lo_b = float(np.min(mu - lam * v - 12 * sd))
    hi_b = float(np.max(mu + lam * v + 12 * sd))
    zb = np.linspace(min(lo_b, 0.0), max(hi_b, 0.0), 400_001)
    fz = d(zb) * np.exp(lam * np.abs(zb))
    # log-derivative bound over the window caps the growth between grid points
    logslope = float(np.max((hi_b - lo_b) / v)) + lam
    beta = min(beta, float(fz.max()) * math.exp(logslope * (zb[1] - zb[0])))
    m = float(np.dot(w, mu))
    var = float(np.dot(w, v + mu**2) - m * m)
    return ContinuousUnbounded(
        d,
        C=C,
        beta=beta,
        lam=float(lam),
        cdf_fn=F,
        sampler=draw,
        mean_value=m,
        var_value=var,
        breaks=tuple(float(x) for x in mu),
        name="gaussian_mixture",
    )


PRESETS = {
    "bernoulli": bernoulli,
    "categorical": categorical,
    "geometric": geometric,
    "uniform": uniform,
    "triangular": triangular,
    "polynomial": polynomial,
    "gaussian": gaussian,
    "laplace": laplace,
    "gaussian_mixture": gaussian_mixture,
}


def from_preset(name: str, **params) -> ArmDistribution:
    """Build a distribution from a preset name and keyword parameters."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}", "preset")
    try:
        return PRESETS[name](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}", "preset") from None
