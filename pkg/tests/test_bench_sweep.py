import math

import pytest

from purex.bench import config, sweep
from purex.errors import ConfigError

from conftest import BERNOULLI_TOML


def test_parse_vary_forms():
    assert sweep.parse_vary("problem.delta=0.1,0.01") == ("problem.delta", [0.1, 0.01])
    assert sweep.parse_vary("arms.0.p=[0.9, 0.7]") == ("arms.0.p", [0.9, 0.7])
    assert sweep.parse_vary("run.framework=\"racing\"") == ("run.framework", ["racing"])
    assert sweep.parse_vary("problem.delta=") == ("problem.delta", [])
    with pytest.raises(ConfigError):
        sweep.parse_vary("problem.delta")
    with pytest.raises(ConfigError):
        sweep.parse_vary("problem.delta=0.1,,")


def test_empty_grid_gives_empty_table():
    res = sweep.sweep(config.loads(BERNOULLI_TOML), "problem.delta", [])
    assert res.table() == []
    assert res.to_csv().strip() == ",".join(sweep.TABLE_COLUMNS)
    assert res.summary["points"] == 0


def test_summary_of_exact_log_scaling():
    T = [5.0 + 7.0 * math.log(1 / d) for d in (0.1, 0.01, 0.001)]
    s = sweep.scaling_summary("problem.delta", [0.001, 0.1, 0.01], [T[2], T[0], T[1]])
    assert s["order"] == [0.1, 0.01, 0.001]
    assert s["slope"] == pytest.approx(7.0, rel=1e-12)
    assert s["intercept"] == pytest.approx(5.0, rel=1e-12)
    assert s["max_increment_disagreement"] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("framework", ["lucb", "racing"])
def test_delta_sweep_has_additive_log_structure(framework):
    cfg = config.with_override(config.loads(BERNOULLI_TOML), "run.framework", framework)
    res = sweep.sweep(cfg, "problem.delta", [0.1, 0.01, 0.001], reps=100)
    T = res.summary["mean_T"]
    assert T == sorted(T) and T[0] < T[-1]
    assert res.summary["max_increment_disagreement"] <= 0.25


@pytest.mark.parametrize("framework", ["lucb", "racing"])
def test_gap_sweep_shows_inverse_square_scaling(framework):
    cfg = config.with_override(config.loads(BERNOULLI_TOML), "run.framework", framework)
    # arm 1 has mean 0.5, so gaps are 0.4, 0.2 and 0.1
    res = sweep.sweep(cfg, "arms.0.p", [0.9, 0.7, 0.6], reps=100)
    assert all(3.0 <= r <= 6.0 for r in res.summary["ratios"]), res.summary["ratios"]
