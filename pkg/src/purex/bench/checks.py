"""Built-in validation suites run by ``purex check``.

Every check draws from its own seeded generator, so a suite gives the same
verdicts on every run. Functions of the core modules are looked up through
their module at call time, which lets :data:`CORRUPTIONS` swap one out as a
negative control.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from purex import arms, confidence, estimation, metrics, rewards
from purex.bench import canonical
from purex.bench.runner import binomial_slack, replication_seed
from purex.confidence import CaseKind, ConfidenceCase
from purex.explorer import lucb_reference, racing
from purex.explorer import lucb as lucb_run

SUITE_NAMES = ("metrics", "estimation", "confidence", "rewards", "explorer")
ARITH_TOL = 1e-12
QUAD_SLACK = 1e-6


@dataclass(frozen=True)
class CheckResult:
    """Verdict of one check."""

    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}.{self.name}: {self.detail}"


def _rng(tag: str, seed: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, sum(tag.encode())])


def _random_pmf(rng, k: int) -> np.ndarray:
    p = rng.dirichlet(np.ones(k))
    # some exact zeros so boundary cases are covered
    p[rng.random(k) < 0.15] = 0.0
    if p.sum() == 0.0:
        p[rng.integers(k)] = 1.0
    return p / p.sum()


# metrics ---------------------------------------------------------------------------------


def tv_oracle(seed=0, pairs=1000):
    rng = _rng("tv_oracle", seed)
    worst = 0.0
    for _ in range(pairs):
        k = int(rng.integers(1, 13))
        p, q = _random_pmf(rng, k), _random_pmf(rng, k)
        worst = max(worst, abs(metrics.tv_discrete(p, q) - metrics.tv_bruteforce(p, q)))
    return worst <= ARITH_TOL, f"max |tv_discrete - tv_bruteforce| = {worst:.3e} over {pairs} pairs"


def _random_categorical(rng, labels):
    return arms.categorical(labels, _random_pmf(rng, len(labels)))


def distance_axioms(seed=0, triples=200):
    rng = _rng("distance_axioms", seed)
    bad = []
    for _ in range(triples):
        labels = np.sort(rng.choice(np.linspace(0.0, 1.0, 21), size=int(rng.integers(2, 9)), replace=False))
        a, b, c = (_random_categorical(rng, labels) for _ in range(3))
        for kind in metrics.DistanceKind:
            d = lambda x, y: metrics.distance(kind, x, y)  # noqa: E731
            ab, ba, bc, ac, aa = d(a, b), d(b, a), d(b, c), d(a, c), d(a, a)
            if ab < 0 or abs(ab - ba) > ARITH_TOL or aa > ARITH_TOL or ac > ab + bc + ARITH_TOL:
                bad.append(kind.value)
    return not bad, f"{len(bad)} violations over {triples} triples x 3 distances"


def ks_below_tv(seed=0, pairs=1000):
    rng = _rng("ks_below_tv", seed)
    worst = -math.inf
    for _ in range(pairs):
        labels = np.arange(int(rng.integers(1, 13)), dtype=float)
        a, b = _random_categorical(rng, labels), _random_categorical(rng, labels)
        worst = max(worst, metrics.ks_distance(a, b) - metrics.tv_distance(a, b))
    return worst <= ARITH_TOL, f"max (KS - TV) = {worst:.3e} over {pairs} pairs"


def mean_below_range_tv(seed=0, pairs=1000):
    rng = _rng("mean_below_range_tv", seed)
    worst = -math.inf
    for _ in range(pairs):
        labels = np.sort(rng.choice(np.linspace(0.0, 1.0, 41), size=int(rng.integers(2, 10)), replace=False))
        a, b = _random_categorical(rng, labels), _random_categorical(rng, labels)
        worst = max(worst, metrics.mean_distance(a, b) - 1.0 * metrics.tv_distance(a, b))
    return worst <= ARITH_TOL, f"max (mean distance - TV) = {worst:.3e} over {pairs} [0,1] pairs"


# estimation ------------------------------------------------------------------------------


def _is_pow2(x: float) -> bool:
    m, _ = math.frexp(x)
    return m == 0.5


def estimator_invariants(seed=0, cases=200):
    rng = _rng("estimator_invariants", seed)
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(1, 3000))
        S = np.arange(int(rng.integers(1, 9)))
        pmf = estimation.empirical_pmf(rng.choice(S, size=n), S)
        bad += abs(pmf.probs.sum() - 1.0) > ARITH_TOL or bool(np.any(pmf.probs < 0))
        C = float(rng.uniform(0.1, 5.0))
        h = estimation.binned_density(rng.random(n), C)
        mass = float(h.heights.sum() * h.width)
        ok = abs(mass - 1.0) <= ARITH_TOL and _is_pow2(h.width) and h.width <= 0.5
        ok &= math.sqrt(1.0 / (4 * n * h.width)) >= C * h.width / 4
        bad += not ok
        beta, lam, delta = float(rng.uniform(0.2, 3)), float(rng.uniform(0.3, 3)), float(rng.uniform(0.01, 0.5))
        t = estimation.unbounded_density(rng.standard_normal(n) * rng.uniform(0.5, 4), C, beta, lam, delta)
        mass = float(t.heights.sum() * t.width + t.left + t.right)
        ok = abs(mass - 1.0) <= ARITH_TOL and _is_pow2(t.width) and _is_pow2(t.half_width)
        ok &= math.sqrt(math.log(1 / delta) / (2 * n)) >= 2 * beta / lam * math.exp(-lam * t.half_width)
        ok &= math.sqrt(t.half_width / (n * t.width)) >= C * t.half_width * t.width / 2
        bad += not ok
    return bad == 0, f"{bad} estimates violating mass, power-of-two or stop conditions out of {3 * cases}"


def estimator_determinism(seed=0):
    rng = _rng("estimator_determinism", seed)
    x = rng.standard_normal(500)
    u = rng.random(500)
    a = estimation.unbounded_density(x, 1.0, 1.0, 1.0, 0.1)
    b = estimation.unbounded_density(x.copy(), 1.0, 1.0, 1.0, 0.1)
    c = estimation.binned_density(u, 2.0)
    d = estimation.binned_density(u.copy(), 2.0)
    same = np.array_equal(a.heights, b.heights) and (a.left, a.right) == (b.left, b.right)
    same &= np.array_equal(c.heights, d.heights)
    return bool(same), "repeat estimates are bit-identical" if same else "repeat estimates differ"


def concentration(seed=0, trials=2000):
    probs = np.array([0.4, 0.3, 0.2, 0.1])
    S = np.arange(4)
    dist = arms.categorical(S, probs)
    parts, ok = [], True
    for n, delta in ((200, 0.1), (1000, 0.05)):
        eps = math.sqrt(math.log(1 / delta) / (2 * n)) + math.sqrt(S.size / (4 * n))
        hits = 0
        for t in range(trials):
            g = np.random.default_rng(replication_seed(seed + n, t))
            p_hat = estimation.empirical_pmf(arms.sample(dist, g, n), S).probs
            hits += metrics.tv_discrete(p_hat, probs) >= eps
        rate, ceil = hits / trials, binomial_slack(delta, trials)
        ok &= rate <= ceil
        parts.append(f"(n={n}, delta={delta}) rate {rate:.4f} <= {ceil:.4f}")
    return ok, "; ".join(parts)


def width_bounds(seed=0, cases=2000):
    rng = _rng("width_bounds", seed)
    bad = 0
    for _ in range(cases):
        C = float(np.exp(rng.uniform(math.log(0.05), math.log(20))))
        # the lower bound needs C^2 n >= 4 because widths never exceed 1/2
        n = max(int(np.exp(rng.uniform(0, math.log(1e8)))), math.ceil(4 / (C * C)))
        ell = estimation.bounded_width(n, C)
        bad += ell < (1.0 / (2 * C * C * n)) ** (1.0 / 3.0)
        beta, lam = float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10))
        delta = float(np.exp(rng.uniform(math.log(1e-9), math.log(0.9))))
        L, _ = estimation.unbounded_window(n, C, beta, lam, delta)
        arg = beta / lam * math.sqrt(8 * n / math.log(1 / delta))
        cap = 2 / lam * math.log(arg) if arg > 1 else -math.inf
        # L = 1 means no doubling happened
        bad += not (L == 1.0 or L < cap)
    return bad == 0, f"{bad} violations of the width lower bound or window upper bound in {cases} tuples"


# confidence ------------------------------------------------------------------------------


def random_case(rng, kind: CaseKind) -> ConfidenceCase:
    """A case of ``kind`` with random constants."""
    s2min = float(rng.uniform(0.2, 2.0))
    constants = {
        "B": float(rng.uniform(0.5, 3.0)),
        "support_size": int(rng.integers(2, 60)),
        "C": float(np.exp(rng.uniform(math.log(0.05), math.log(10)))),
        "beta": float(rng.uniform(0.1, 5.0)),
        "lam": float(rng.uniform(0.2, 5.0)),
        "sigma2_min": s2min,
        "sigma2_max": s2min * float(rng.uniform(1.0, 4.0)),
    }
    need = {"B"} | set(confidence._REQUIRED[kind])
    return ConfidenceCase(kind, **{k: v for k, v in constants.items() if k in need})


def _delta_gap(rng):
    delta = float(np.exp(rng.uniform(math.log(1e-6), math.log(0.5))))
    gap = float(np.exp(rng.uniform(math.log(2e-3), math.log(1.0))))
    return delta, gap


def calculus_consistency(seed=0, tuples=500):
    rng = _rng("calculus_consistency", seed)
    parts, ok = [], True
    for kind in CaseKind:
        worst = -math.inf
        for _ in range(tuples):
            case = random_case(rng, kind)
            delta, gap = _delta_gap(rng)
            n = confidence.n_H(case, delta, gap)
            worst = max(worst, confidence.delta_H(case, delta, n) - gap)
        ok &= worst <= ARITH_TOL
        parts.append(f"{kind.name} max excess {worst:.2e}")
    return ok, "; ".join(parts)


def calculus_monotone(seed=0, tuples=300):
    rng = _rng("calculus_monotone", seed)
    bad: dict = {}
    for kind in CaseKind:
        for _ in range(tuples):
            case = random_case(rng, kind)
            (d1, g1), (d2, g2) = _delta_gap(rng), _delta_gap(rng)
            dlo, dhi, glo, ghi = min(d1, d2), max(d1, d2), min(g1, g2), max(g1, g2)
            n1, n2 = sorted(int(x) for x in rng.integers(1, 10**7, size=2))
            fails = {
                "n_H vs gap": confidence.n_H(case, dlo, glo) < confidence.n_H(case, dlo, ghi),
                "n_H vs delta": confidence.n_H(case, dlo, glo) < confidence.n_H(case, dhi, glo),
                "delta_H vs n": confidence.delta_H(case, dlo, n1) < confidence.delta_H(case, dlo, n2),
                "delta_H vs 1/delta": confidence.delta_H(case, dlo, n1) < confidence.delta_H(case, dhi, n1),
            }
            for rel, failed in fails.items():
                if failed:
                    bad[(kind.name, rel)] = bad.get((kind.name, rel), 0) + 1
    if not bad:
        return True, f"no violations over {tuples} tuples per case"
    return False, "violations: " + "; ".join(f"{k} {rel}: {c}/{tuples}" for (k, rel), c in bad.items())


def gaussian_fit_radius(seed=0, tuples=500):
    rng = _rng("gaussian_fit_radius", seed)
    worst = 0.0
    for _ in range(tuples):
        c = random_case(rng, CaseKind.GAUSSIAN_FIT_TV)
        delta, _ = _delta_gap(rng)
        n = int(rng.integers(1, 10**8))
        l4, l2 = math.log(4 / delta), math.log(2 / delta)
        lg = max(1.0, math.log(c.beta / c.lam * math.sqrt(8 * n / l2)))
        hoeff = math.sqrt(2 * l4 / n)
        binning = (8 * math.sqrt(2) * c.C * lg * lg / (n * c.lam**2)) ** (1 / 3)
        mean_term = math.sqrt(c.sigma2_max * l4 / (math.pi * n))
        var_term = math.sqrt(4 * c.sigma2_max**2 * l4 / (math.pi * c.sigma2_min**2 * n))
        want = c.B * (hoeff + binning + mean_term + var_term)
        worst = max(worst, abs(confidence.delta_H(c, delta, n) - want) / want)
    return worst <= ARITH_TOL, f"max relative deviation {worst:.2e} from the four-term expression"


# rewards ---------------------------------------------------------------------------------


def point_mass_mean(seed=0, cases=200):
    rng = _rng("point_mass_mean", seed)
    worst = 0.0
    for c in rng.uniform(-100, 100, size=cases):
        v = rewards.eval(rewards.RewardSpec.mean(), arms.categorical([float(c)], [1.0]))
        worst = max(worst, abs(v - c))
    return worst == 0.0, f"max |H - c| = {worst:.3e}"


def gaussian_shift_bound(seed=0, tuples=100):
    # the unscaled form needs sigma >= 1
    rng = _rng("gaussian_shift_bound", seed)
    worst = -math.inf
    for _ in range(tuples):
        mu, mu_hat = rng.uniform(-3, 3, size=2)
        sigma = float(rng.uniform(1.0, 3.0))
        tv = metrics.tv_continuous(arms.gaussian(mu, sigma**2), arms.gaussian(mu_hat, sigma**2)).value
        worst = max(worst, tv - abs(mu - mu_hat) / math.sqrt(2 * math.pi))
    return worst <= QUAD_SLACK, f"max (TV - bound) = {worst:.3e} over {tuples} tuples"


def gaussian_scale_bound(seed=0, tuples=100):
    rng = _rng("gaussian_scale_bound", seed)
    worst = -math.inf
    for _ in range(tuples):
        s2min = float(rng.uniform(0.2, 3.0))
        s2max = s2min * float(rng.uniform(1.0, 4.0))
        v1, v2 = rng.uniform(s2min, s2max, size=2)
        mu = float(rng.uniform(-3, 3))
        tv = metrics.tv_continuous(arms.gaussian(mu, v1), arms.gaussian(mu, v2)).value
        worst = max(worst, tv - abs(v1 - v2) / (math.sqrt(2 * math.pi) * s2min))
    return worst <= QUAD_SLACK, f"max (TV - bound) = {worst:.3e} over {tuples} tuples"


def dkw_coverage(seed=0, trials=2000, n=100, delta=0.05):
    band = confidence.dkw_band(delta, n)
    i = np.arange(1, n + 1)
    misses = 0
    for t in range(trials):
        u = np.sort(np.random.default_rng(replication_seed(seed + 7, t)).random(n))
        ks = max(np.max(i / n - u), np.max(u - (i - 1) / n))
        misses += ks > band
    rate, ceil = misses / trials, binomial_slack(delta, trials)
    return rate <= ceil, f"violation rate {rate:.4f} <= {ceil:.4f} (band {band:.5f})"


def quantile_coverage(seed=0, trials=2000, n=100, delta=0.05):
    parts, ok = [], True
    for label, dist, tau in (("uniform", arms.uniform(), 0.5), ("laplace", arms.laplace(0.0, 1.0), 0.9)):
        q = arms.true_quantile(dist, tau)
        misses = 0
        for t in range(trials):
            x = arms.sample(dist, np.random.default_rng(replication_seed(seed + 11, t)), n)
            lo, hi = rewards.quantile_ci(x, tau, delta)
            misses += not lo <= q <= hi
        rate, ceil = misses / trials, binomial_slack(delta, trials)
        ok &= rate <= ceil
        parts.append(f"{label} tau={tau} miss rate {rate:.4f} <= {ceil:.4f}")
    return ok, "; ".join(parts)


# explorer --------------------------------------------------------------------------------


def racing_invariants(seed=0, runs=20):
    bad = 0
    for make in (canonical.bernoulli_means, canonical.finite_tv):
        p = make()
        for r in range(runs):
            res = racing(p, replication_seed(seed, r), keep_trace=True)
            alive = set(range(p.m))
            final = {}
            for ph in res.trace:
                bad += not set(ph.survivors) <= alive
                bad += ph.n_target != confidence.n_H(p.case, ph.delta_k, ph.rad)
                for i in ph.survivors:
                    final[i] = ph.n_target
                alive = set(ph.survivors) - set(ph.eliminated)
            bad += tuple(final.get(i, 0) for i in range(p.m)) != res.counts
    return bad == 0, f"{bad} violations over {2 * runs} traced runs"


def lucb_certificate(seed=0, runs=20):
    bad = 0
    for make in (canonical.bernoulli_means, canonical.finite_tv):
        p = make()
        for r in range(runs):
            res = lucb_reference(p, replication_seed(seed, r), keep_trace=True)
            last = res.trace[-1]
            H, rad = res.final_estimates, last.radii
            if res.stop_reason == "converged":
                bad += not H[last.i1] - rad[last.i1] >= H[last.i2] + rad[last.i2]
            bad += res.output_arm != last.i1
    return bad == 0, f"{bad} certificate failures over {2 * runs} traced runs"


def _racing_lean(p, s):
    return racing(p, s, keep_trace=False)


def correctness(seed=0):
    parts, ok = [], True
    for name in ("bernoulli_means", "finite_tv"):
        p = canonical.CANONICAL[name]()
        M = math.ceil(40 / p.delta)
        ceil = binomial_slack(p.delta, M)
        for fw, run in (("racing", _racing_lean), ("lucb", lucb_run)):
            wrong = sum(run(p, replication_seed(seed, r)).output_arm != p.best_arm for r in range(M))
            ok &= wrong / M <= ceil
            parts.append(f"{name}/{fw} {wrong}/{M} <= {ceil:.4f}")
    return ok, "; ".join(parts)


def reproducible(seed=0):
    p = canonical.finite_tv()
    same = True
    for r in range(5):
        s = replication_seed(seed, r)
        a, b = lucb_run(p, s), lucb_run(p, s)
        c, d = racing(p, s, keep_trace=False), racing(p, s, keep_trace=False)
        same &= (a.counts, a.output_arm, a.final_estimates) == (b.counts, b.output_arm, b.final_estimates)
        same &= (c.counts, c.output_arm) == (d.counts, d.output_arm)
    return bool(same), "repeat runs are identical" if same else "repeat runs differ"


SUITES: dict[str, tuple[Callable, ...]] = {
    "metrics": (tv_oracle, distance_axioms, ks_below_tv, mean_below_range_tv),
    "estimation": (estimator_invariants, estimator_determinism, concentration, width_bounds),
    "confidence": (calculus_consistency, calculus_monotone, gaussian_fit_radius),
    "rewards": (point_mass_mean, gaussian_shift_bound, gaussian_scale_bound, dkw_coverage, quantile_coverage),
    "explorer": (racing_invariants, lucb_certificate, correctness, reproducible),
}


# negative controls -----------------------------------------------------------------------


@contextlib.contextmanager
def _patched(module, name, fn):
    orig = getattr(module, name)
    setattr(module, name, fn(orig))
    try:
        yield
    finally:
        setattr(module, name, orig)


CORRUPTIONS = {
    # under-sized sample counts break the calculus pair
    "n_H": lambda: _patched(confidence, "n_H", lambda f: lambda c, d, g: max(1, f(c, d, g) // 2)),
    # a narrower band loses coverage
    "dkw_band": lambda: _patched(confidence, "dkw_band", lambda f: lambda d, n: 0.8 * f(d, n)),
    # a biased TV breaks the oracle match
    "tv_discrete": lambda: _patched(metrics, "tv_discrete", lambda f: lambda p, q: 1.001 * f(p, q)),
}


def run_suite(name: str, seed: int = 0, corrupt: Optional[str] = None, progress=None) -> list[CheckResult]:
    """Run one suite, or every suite for ``"all"``.

    Args:
        name: A name in :data:`SUITE_NAMES` or ``"all"``.
        seed: Seed shared by all checks.
        corrupt: Name in :data:`CORRUPTIONS` to apply while checking.
        progress: Optional callable invoked with each :class:`CheckResult`.

    Raises:
        KeyError: for an unknown suite or corruption.
    """
    names = SUITE_NAMES if name == "all" else (name,)
    for n in names:
        if n not in SUITES:
            raise KeyError(n)
    ctx = CORRUPTIONS[corrupt]() if corrupt else contextlib.nullcontext()
    out = []
    with ctx:
        for n in names:
            for check in SUITES[n]:
                passed, detail = check(seed)
                res = CheckResult(n, check.__name__, bool(passed), detail)
                out.append(res)
                if progress is not None:
                    progress(res)
    return out
