from pathlib import Path

import pytest

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BERNOULLI_TOML = """
[problem]
delta = 0.1

[arms.0]
preset = "bernoulli"
p = 0.9

[arms.1]
preset = "bernoulli"
p = 0.5

[reward]
kind = "Mean"

[case]
kind = "HoeffdingMean"

[run]
framework = "lucb"
replications = 20
seed = 3
"""


@pytest.fixture
def bernoulli_toml(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(BERNOULLI_TOML)
    return path


@pytest.fixture
def configs_dir():
    return CONFIGS
