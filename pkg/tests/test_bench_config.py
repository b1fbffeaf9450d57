import pytest

from purex.bench import config
from purex.errors import ConfigError

from conftest import BERNOULLI_TOML


def test_parses_example_configs(configs_dir):
    names = sorted(p.name for p in configs_dir.glob("*.toml"))
    assert names == ["bernoulli_means.toml", "bounded_tv.toml", "finite_tv.toml", "gaussian_fit.toml"]
    for p in configs_dir.glob("*.toml"):
        cfg = config.load(p)
        assert cfg.replications == 400
        assert cfg.problem.best_arm == 0


def test_fields(bernoulli_toml):
    cfg = config.load(bernoulli_toml)
    assert (cfg.framework, cfg.replications, cfg.seed, cfg.format) == ("lucb", 20, 3, "csv")
    assert cfg.problem.delta == 0.1 and cfg.problem.m == 2


@pytest.mark.parametrize(
    "edit, path",
    [
        (("[run]", "[run]\nbogus = 1"), "run.bogus"),
        (("[problem]", "[problem]\nwhat = 2"), "problem.what"),
        (('kind = "Mean"', 'kind = "Mean"\ntau = 0.5'), "reward.tau"),
        (('preset = "bernoulli"\np = 0.9', 'preset = "bernoulli"\np = 1.9'), "arms.0.p"),
        (('preset = "bernoulli"\np = 0.9', 'preset = "nope"'), "arms.0.preset"),
        (('kind = "HoeffdingMean"', 'kind = "BoundedContinuousTV"'), "case.C"),
        (("replications = 20", "replications = 0"), "run.replications"),
        (('framework = "lucb"', 'framework = "ucb"'), "run.framework"),
        (("delta = 0.1", "delta = 2.0"), "problem.delta"),
        (("[reward]", "[rewards]"), "rewards"),
    ],
)
def test_errors_carry_field_path(edit, path):
    text = BERNOULLI_TOML.replace(*edit, 1)
    with pytest.raises(ConfigError) as err:
        config.loads(text)
    assert err.value.path == path


def test_invalid_toml_is_a_config_error():
    with pytest.raises(ConfigError):
        config.loads("[problem\n")


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        config.load(tmp_path / "absent.toml")


def test_override_revalidates(bernoulli_toml):
    cfg = config.load(bernoulli_toml)
    assert config.with_override(cfg, "problem.delta", 0.01).problem.delta == 0.01
    assert config.with_override(cfg, "arms.0.p", 0.7).problem.true_values[0] == pytest.approx(0.7)
    with pytest.raises(ConfigError):
        config.with_override(cfg, "arms.0.p", 7.0)
    with pytest.raises(ConfigError):
        config.with_override(cfg, "nosuch.key", 1)
