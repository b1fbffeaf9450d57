"""Experiment configuration files.

A config is a TOML document with five sections::

    [problem]
    delta = 0.1                 # target error probability
    budget_cap = 100000         # optional cap on total pulls

    [arms.0]                    # one table per arm, numbered from 0
    preset = "bernoulli"        # any name in purex.arms.PRESETS
    p = 0.9                     # remaining keys are the preset's parameters

    [reward]
    kind = "Mean"               # Mean | Quantile | NegDistanceToTarget | NegTVToFittedGaussian
    B = 1.0                     # Lipschitz constant (optional)
    tau = 0.5                   # Quantile only
    distance = "TotalVariation" # NegDistanceToTarget only
    sigma2_min = 1.0            # NegTVToFittedGaussian only
    sigma2_max = 2.0
    target = { preset = "uniform" }   # NegDistanceToTarget only

    [case]
    kind = "HoeffdingMean"      # a name in purex.confidence.CASE_NAMES
    # B, support_size, C, beta, lam, sigma2_min, sigma2_max as the case needs

    [run]
    framework = "lucb"          # lucb | racing
    replications = 100
    seed = 0
    lucb_refresh_growth = 0.0
    out = "report.csv"          # optional
    format = "csv"              # csv | json

Unknown sections or keys are errors, reported with their dotted path.
"""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from purex import arms
from purex.confidence import CASE_NAMES, ConfidenceCase
from purex.errors import ConfigError, PurexError
from purex.explorer.problem import Problem
from purex.rewards import RewardKind, RewardSpec

SECTIONS = ("problem", "arms", "reward", "case", "run")
PROBLEM_KEYS = ("delta", "budget_cap")
REWARD_KEYS = ("kind", "B", "tau", "distance", "target", "sigma2_min", "sigma2_max")
CASE_KEYS = ("kind", "B", "support_size", "C", "beta", "lam", "sigma2_min", "sigma2_max")
RUN_KEYS = ("framework", "replications", "seed", "lucb_refresh_growth", "out", "format")
FRAMEWORKS = ("lucb", "racing")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    """A parsed and validated experiment.

    Attributes:
        problem: The best-arm identification instance.
        framework: ``"lucb"`` or ``"racing"``.
        replications: Number of seeded replications.
        seed: Base seed.
        lucb_refresh_growth: Refresh growth passed to LUCB.
        out: Output path, if any.
        format: ``"csv"`` or ``"json"``.
        raw: The parsed document, kept for sweeps.
    """

    problem: Problem
    framework: str = "lucb"
    replications: int = 1
    seed: int = 0
    lucb_refresh_growth: float = 0.0
    out: Optional[str] = None
    format: str = "csv"
    raw: Optional[dict] = None


def load(path) -> ExperimentConfig:
    """Read and validate a config file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}", "") from None
    return loads(text)


def loads(text: str) -> ExperimentConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}", "") from None
    return from_dict(doc)


def from_dict(doc: dict) -> ExperimentConfig:
    """Validate a parsed document and build the experiment."""
    _only(doc, SECTIONS, "")
    if "problem" not in doc:
        raise ConfigError("missing section [problem]", "problem")
    prob = _table(doc, "problem")
    _only(prob, PROBLEM_KEYS, "problem")
    for name in ("arms", "reward", "case"):
        if name not in doc:
            raise ConfigError(f"missing section [{name}]", name)
    if "delta" not in prob:
        raise ConfigError("missing key", "problem.delta")
    delta = _number(prob, "delta", "problem")
    cap = prob.get("budget_cap")
    if cap is not None:
        cap = _integer(prob, "budget_cap", "problem", minimum=1)

    arm_list = _arms(_table(doc, "arms"))
    reward = _reward(_table(doc, "reward"))
    case = _case(_table(doc, "case"))
    try:
        problem = Problem(arm_list, reward, case, delta, cap)
    except ConfigError:
        raise
    except (PurexError, ValueError) as exc:
        raise ConfigError(str(exc), "problem") from None

    run = _table(doc, "run") if "run" in doc else {}
    _only(run, RUN_KEYS, "run")
    framework = run.get("framework", "lucb")
    if framework not in FRAMEWORKS:
        raise ConfigError(f"framework must be one of {FRAMEWORKS}", "run.framework")
    reps = _integer(run, "replications", "run", minimum=1) if "replications" in run else 1
    seed = _integer(run, "seed", "run", minimum=0) if "seed" in run else 0
    growth = _number(run, "lucb_refresh_growth", "run") if "lucb_refresh_growth" in run else 0.0
    if growth < 0:
        raise ConfigError("must be nonnegative", "run.lucb_refresh_growth")
    fmt = run.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", "run.format")
    out = run.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("must be a string", "run.out")
    return ExperimentConfig(problem, framework, reps, seed, growth, out, fmt, copy.deepcopy(doc))


def with_override(cfg: ExperimentConfig, dotted: str, value: Any) -> ExperimentConfig:
    """A copy of ``cfg`` with one dotted key replaced, revalidated.

    Examples:
        ``with_override(cfg, "problem.delta", 0.01)``
        ``with_override(cfg, "arms.0.p", 0.8)``
    """
    doc = copy.deepcopy(cfg.raw)
    parts = dotted.split(".")
    node = doc
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError("no such section", dotted)
        node = node[part]
    if not isinstance(node, dict):
        raise ConfigError("no such section", dotted)
    node[parts[-1]] = value
    return from_dict(doc)


# sections -------------------------------------------------------------------------


def _arms(table: dict) -> list:
    keys = sorted(table, key=lambda k: (not k.isdigit(), int(k) if k.isdigit() else 0, k))
    expected = [str(i) for i in range(len(table))]
    if keys != expected:
        raise ConfigError(f"arm tables must be numbered 0..{len(table) - 1}, got {sorted(table)}", "arms")
    return [_distribution(_table(table, k, "arms"), f"arms.{k}") for k in expected]


def _distribution(spec: dict, path: str):
    if "preset" not in spec:
        raise ConfigError("missing preset name", f"{path}.preset")
    params = {k: v for k, v in spec.items() if k != "preset"}
    name = spec["preset"]
    if name not in arms.PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(arms.PRESETS)}", f"{path}.preset")
    try:
        return arms.from_preset(name, **params)
    except ConfigError as exc:
        raise ConfigError(exc.detail, f"{path}.{exc.path}" if exc.path and exc.path != "preset" else path) from None
    except (PurexError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from None


def _reward(table: dict) -> RewardSpec:
    _only(table, REWARD_KEYS, "reward")
    kind = table.get("kind")
    kinds = [k.value for k in RewardKind]
    if kind not in kinds:
        raise ConfigError(f"kind must be one of {kinds}", "reward.kind")
    allowed = {
        "Mean": ("kind", "B"),
        "Quantile": ("kind", "tau"),
        "NegDistanceToTarget": ("kind", "B", "distance", "target"),
        "NegTVToFittedGaussian": ("kind", "B", "sigma2_min", "sigma2_max"),
    }[kind]
    for k in table:
        if k not in allowed:
            raise ConfigError(f"not used by reward {kind}", f"reward.{k}")
    B = _number(table, "B", "reward") if "B" in table else 1.0
    if kind == "Mean":
        return RewardSpec.mean(B)
    if kind == "Quantile":
        if "tau" not in table:
            raise ConfigError("missing key", "reward.tau")
        return RewardSpec.quantile(_number(table, "tau", "reward"))
    if kind == "NegDistanceToTarget":
        if "target" not in table:
            raise ConfigError("missing key", "reward.target")
        target = _distribution(_table(table, "target", "reward"), "reward.target")
        try:
            return RewardSpec.neg_distance(target, table.get("distance", "TotalVariation"), B)
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc), "reward.distance") from None
    for k in ("sigma2_min", "sigma2_max"):
        if k not in table:
            raise ConfigError("missing key", f"reward.{k}")
    return RewardSpec.neg_tv_fitted_gaussian(
        _number(table, "sigma2_min", "reward"), _number(table, "sigma2_max", "reward"), B
    )


def _case(table: dict) -> ConfidenceCase:
    _only(table, CASE_KEYS, "case")
    name = table.get("kind")
    if name not in CASE_NAMES:
        raise ConfigError(f"kind must be one of {sorted(CASE_NAMES)}", "case.kind")
    constants = {}
    for k in CASE_KEYS[1:]:
        if k in table:
            constants[k] = _integer(table, k, "case", minimum=1) if k == "support_size" else _number(table, k, "case")
    return ConfidenceCase.from_name(name, **constants)


# helpers ---------------------------------------------------------------------------


def _only(table: dict, allowed, path: str) -> None:
    for k in table:
        if k not in allowed:
            where = f"{path}.{k}" if path else k
            raise ConfigError("unknown key", where)


def _table(doc: dict, key: str, path: str = "") -> dict:
    v = doc[key]
    where = f"{path}.{key}" if path else key
    if not isinstance(v, dict):
        raise ConfigError("expected a table", where)
    return v


def _number(table: dict, key: str, path: str) -> float:
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", f"{path}.{key}")
    return float(v)


def _integer(table: dict, key: str, path: str, minimum: int = 0) -> int:
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError("expected an integer", f"{path}.{key}")
    if v < minimum:
        raise ConfigError(f"must be at least {minimum}", f"{path}.{key}")
    return int(v)
