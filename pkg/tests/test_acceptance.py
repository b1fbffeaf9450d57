"""Acceptance suite: one PASS/FAIL line per criterion.

Criteria 1 and 2 replay the four example configs under both frameworks at
400 replications each; the unbounded problem dominates the runtime (about
40 minutes on one core).
"""

import functools

import pytest

from purex.bench import checks, config, report, runner, sweep
from purex.bench.cli import main
from purex.bench.runner import binomial_slack

from conftest import CONFIGS

PROBLEMS = ("bernoulli_means", "finite_tv", "bounded_tv", "gaussian_fit")
FRAMEWORKS = ("racing", "lucb")
REPS = 400
DELTA = 0.1


def _line(capsys, criterion, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}", flush=True)


@functools.lru_cache(maxsize=None)
def _report(problem, framework):
    cfg = config.load(CONFIGS / f"{problem}.toml")
    cfg = config.with_override(cfg, "run.framework", framework)
    assert cfg.problem.delta == DELTA
    return report.build(runner.run(cfg, reps=REPS))


@pytest.mark.slow
@pytest.mark.parametrize("framework", FRAMEWORKS)
@pytest.mark.parametrize("problem", PROBLEMS)
def test_criterion_1_error_rate(problem, framework, capsys):
    a = _report(problem, framework).aggregates
    ceiling = binomial_slack(DELTA, REPS)
    ok = a["failures"] == 0 and a["error_rate"] <= ceiling
    detail = (
        f"correctness {problem}/{framework}: error rate {a['error_rate']:.4f} <= {ceiling:.4f} "
        f"over {a['completed']} runs ({a['failures']} failed, {a['capped']} capped)"
    )
    _line(capsys, 1, ok, detail)
    assert ok, detail


@pytest.mark.slow
@pytest.mark.parametrize("framework", FRAMEWORKS)
@pytest.mark.parametrize("problem", PROBLEMS)
def test_criterion_2_complexity_bound(problem, framework, capsys):
    a = _report(problem, framework).aggregates
    bound = a["racing_bound"] if framework == "racing" else a["lucb_bound"]
    frac = a["within_bound_fraction"]
    ok = frac is not None and frac >= 0.95
    detail = f"bound {problem}/{framework}: {a['within_bound']} of the correct runs have T <= {bound} (fraction {frac}), max T {a['T_max']}"
    _line(capsys, 2, ok, detail)
    assert ok, detail


@pytest.mark.slow
@pytest.mark.parametrize("framework", FRAMEWORKS)
def test_criterion_3_log_delta_scaling(framework, capsys):
    cfg = config.with_override(config.load(CONFIGS / "bernoulli_means.toml"), "run.framework", framework)
    res = sweep.sweep(cfg, "problem.delta", [0.1, 0.01, 0.001], reps=REPS)
    s = res.summary
    ok = s["mean_T"] == sorted(s["mean_T"]) and s["max_increment_disagreement"] <= 0.25
    detail = (
        f"log(1/delta) scaling {framework}: mean T {s['mean_T']}, increments {s['increments']}, "
        f"disagreement {s['max_increment_disagreement']:.4f} <= 0.25, slope {s['slope']:.3f}"
    )
    _line(capsys, 3, ok, detail)
    assert ok, detail


def _check(capsys, criterion, label, *fns):
    results = [fn() for fn in fns]
    ok = all(r[0] for r in results)
    detail = f"{label}: " + "; ".join(r[1] for r in results)
    _line(capsys, criterion, ok, detail)
    assert ok, detail


def test_criterion_4_tv_oracle(capsys):
    _check(capsys, 4, "TV oracle", checks.tv_oracle)


def test_criterion_5_concentration(capsys):
    _check(capsys, 5, "concentration", checks.concentration)


def test_criterion_6_calculus_consistency(capsys):
    _check(capsys, 6, "calculus consistency", checks.calculus_consistency)


def test_criterion_7_gaussian_tv_bounds(capsys):
    _check(capsys, 7, "Gaussian TV bounds", checks.gaussian_shift_bound, checks.gaussian_scale_bound)


def test_criterion_8_coverage(capsys):
    _check(capsys, 8, "coverage", checks.dkw_coverage, checks.quantile_coverage)


@pytest.mark.parametrize("problem", ["bernoulli_means", "finite_tv", "bounded_tv"])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_criterion_9_determinism(problem, fmt, tmp_path, capsys):
    outs = []
    for framework in FRAMEWORKS:
        cfg = tmp_path / f"{framework}.toml"
        cfg.write_text((CONFIGS / f"{problem}.toml").read_text().replace('framework = "lucb"', f'framework = "{framework}"'))
        for k in range(2):
            out = tmp_path / f"{framework}{k}.{fmt}"
            assert main(["run", "--config", str(cfg), "--reps", "5", "--seed", "17", "--out", str(out), "--format", fmt, "--quiet"]) == 0
            outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and outs[2] == outs[3]
    detail = f"determinism {problem}/{fmt}: repeated runs are byte-identical for both frameworks" if ok else "reports differ"
    _line(capsys, 9, ok, detail)
    assert ok, detail
