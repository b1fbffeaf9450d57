"""Grid sweeps over one config key with a log(1/delta) scaling summary."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from purex.bench import report as report_mod
from purex.bench import runner
from purex.bench.config import ExperimentConfig, with_override
from purex.errors import ConfigError

TABLE_COLUMNS = (
    "param",
    "value",
    "framework",
    "replications",
    "failures",
    "capped",
    "error_rate",
    "T_mean",
    "T_median",
    "T_p95",
    "racing_bound",
    "lucb_bound",
)


def parse_vary(text: str) -> tuple[str, list]:
    """Split ``key=v1,v2,...`` into the dotted key and parsed values.

    Values are read as TOML scalars, so ``0.1`` is a float, ``3`` an int and
    ``"x"`` a string. A bracketed list is also accepted.

    Examples:
        >>> parse_vary("problem.delta=0.1,0.01")
        ('problem.delta', [0.1, 0.01])
        >>> parse_vary("arms.0.p=[0.9, 0.7]")
        ('arms.0.p', [0.9, 0.7])
        >>> parse_vary("problem.delta=")
        ('problem.delta', [])
    """
    key, sep, rest = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError("expected KEY=V1,V2,...", "vary")
    rest = rest.strip()
    if not rest.startswith("["):
        rest = f"[{rest}]"
    try:
        values = tomllib.loads(f"v = {rest}")["v"]
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse values: {exc}", f"vary.{key}") from None
    return key, list(values)


@dataclass
class SweepResult:
    """One report per grid point and the scaling summary."""

    param: str
    values: list
    reports: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def table(self) -> list:
        out = []
        for v, rep in zip(self.values, self.reports):
            a = rep.aggregates
            out.append(
                (
                    self.param, v, a["framework"], a["replications"], a["failures"], a["capped"],
                    a["error_rate"], a["T_mean"], a["T_median"], a["T_p95"], a["racing_bound"], a["lucb_bound"],
                )
            )  # fmt: skip
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for row in self.table():
            w.writerow(["" if v is None else v for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "columns": list(TABLE_COLUMNS),
            "table": [dict(zip(TABLE_COLUMNS, row)) for row in self.table()],
            "summary": self.summary,
            "points": [json.loads(r.to_json()) for r in self.reports],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def sweep(cfg: ExperimentConfig, param: str, values: list, seed: Optional[int] = None, reps: Optional[int] = None) -> SweepResult:
    """Run ``cfg`` once per value of ``param``, each with the same base seed."""
    res = SweepResult(param, list(values))
    configs = [with_override(cfg, param, v) for v in values]
    for c in configs:
        res.reports.append(report_mod.build(runner.run(c, seed=seed, reps=reps)))
    T = [r.aggregates["T_mean"] for r in res.reports]
    res.summary = scaling_summary(param, res.values, T)
    return res


def scaling_summary(param: str, values: list, mean_T: list) -> dict:
    """Consecutive increments and ratios of mean ``T``, plus a slope for delta grids.

    For a grid over ``delta`` the points are ordered by ``log(1/delta)`` and
    the summary holds the least-squares slope of mean ``T`` against it and
    the largest relative disagreement between consecutive increments.

    Examples:
        >>> s = scaling_summary("problem.delta", [0.1, 0.01, 0.001], [10.0, 20.0, 30.0])
        >>> round(s["slope"] * math.log(10), 9), s["increments"], s["max_increment_disagreement"]
        (10.0, [10.0, 10.0], 0.0)
        >>> scaling_summary("problem.delta", [], [])["points"]
        0
    """
    out: dict = {"param": param, "points": len(values)}
    pairs = [(v, t) for v, t in zip(values, mean_T) if t is not None]
    is_delta = param.split(".")[-1] == "delta"
    if is_delta:
        pairs.sort(key=lambda p: -p[0])
        x = [math.log(1.0 / float(v)) for v, _ in pairs]
        out["log_inv_delta"] = x
        out["slope"] = float(np.polyfit(x, [t for _, t in pairs], 1)[0]) if len(pairs) >= 2 else None
        out["intercept"] = float(np.polyfit(x, [t for _, t in pairs], 1)[1]) if len(pairs) >= 2 else None
    T = [float(t) for _, t in pairs]
    out["order"] = [v for v, _ in pairs]
    out["mean_T"] = T
    inc = [b - a for a, b in zip(T, T[1:])]
    out["increments"] = inc
    out["ratios"] = [b / a for a, b in zip(T, T[1:])] if all(t > 0 for t in T) else None
    dis = [abs(b - a) / abs(a) for a, b in zip(inc, inc[1:]) if a != 0]
    out["max_increment_disagreement"] = max(dis) if dis else None
    return out


