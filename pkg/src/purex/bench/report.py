"""Per-replication rows, aggregates and their CSV/JSON encodings.

Both encodings carry the same rows with the same fixed columns::

    seed, framework, output_arm, correct, total_pulls, n_arm_0 .. n_arm_{m-1}

``correct`` is 1 or 0. A replication that raised has empty cells in CSV and
``null`` in JSON for every column after ``framework``. JSON adds an
``aggregates`` object and the list of failure messages. No timestamps are
written and floats use their shortest round-trip form, so equal inputs give
identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from purex.bench.runner import RunOutcome, clopper_pearson
from purex.errors import PurexError

BASE_COLUMNS = ("seed", "framework", "output_arm", "correct", "total_pulls")
CI_LEVEL = 0.95


def columns(m: int) -> tuple:
    """Column names for an ``m``-arm problem.

    Examples:
        >>> columns(2)
        ('seed', 'framework', 'output_arm', 'correct', 'total_pulls', 'n_arm_0', 'n_arm_1')
    """
    return BASE_COLUMNS + tuple(f"n_arm_{i}" for i in range(m))


@dataclass
class Report:
    """Rows and aggregates of one run.

    Attributes:
        columns: Fixed column names.
        rows: One tuple per replication in index order.
        aggregates: Summary statistics and theoretical bounds.
        failures: ``(index, message)`` for replications that raised.
    """

    columns: tuple
    rows: list
    aggregates: dict
    failures: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if v is None else v for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "columns": list(self.columns),
            "rows": [dict(zip(self.columns, row)) for row in self.rows],
            "aggregates": self.aggregates,
            "failures": [{"index": i, "message": msg} for i, msg in self.failures],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def build(outcome: RunOutcome) -> Report:
    """Assemble the report of a finished run."""
    problem = outcome.problem
    m = problem.m
    truth = _truth(problem)
    best = truth["best_arm"]
    rows, failures = [], []
    for rep in outcome.replications:
        if rep.failed:
            rows.append((rep.seed, outcome.framework) + (None,) * (3 + m))
            failures.append((rep.index, rep.error))
            continue
        r = rep.result
        correct = None if best is None else int(r.output_arm == best)
        rows.append((rep.seed, outcome.framework, r.output_arm, correct, r.total_pulls) + tuple(int(c) for c in r.counts))
    done = [rep.result for rep in outcome.replications if not rep.failed]
    agg = aggregates(done, best, truth, outcome.framework)
    agg["replications"] = len(outcome.replications)
    agg["failures"] = len(failures)
    agg["base_seed"] = outcome.base_seed
    return Report(columns(m), rows, dict(sorted(agg.items())), failures)


def aggregates(results, best: Optional[int], truth: dict, framework: str) -> dict:
    """Error rate, pull statistics and bounds over completed runs."""
    n = len(results)
    T = np.array([r.total_pulls for r in results], dtype=float)
    agg: dict = {
        "framework": framework,
        "completed": n,
        "capped": sum(r.stop_reason == "budget_cap" for r in results),
        "delta": truth["delta"],
        "best_arm": best,
        "true_values": truth["true_values"],
        "gaps": truth["gaps"],
        "racing_bound": truth["racing_bound"],
        "lucb_bound": truth["lucb_bound"],
        "T_mean": _num(T.mean()) if n else None,
        "T_median": _num(np.median(T)) if n else None,
        "T_p95": _num(np.percentile(T, 95)) if n else None,
        "T_min": _num(T.min()) if n else None,
        "T_max": _num(T.max()) if n else None,
    }
    if best is None or n == 0:
        agg.update(errors=None, error_rate=None, error_rate_ci=None, within_bound=None, within_bound_fraction=None)
        return agg
    wrong = sum(r.output_arm != best for r in results)
    lo, hi = clopper_pearson(wrong, n, CI_LEVEL)
    agg["errors"] = wrong
    agg["error_rate"] = wrong / n
    agg["error_rate_ci"] = [lo, hi]
    agg["error_rate_ci_level"] = CI_LEVEL
    bound = truth["racing_bound"] if framework == "racing" else truth["lucb_bound"]
    ok = [r for r in results if r.output_arm == best]
    if bound is None or not ok:
        agg["within_bound"] = None
        agg["within_bound_fraction"] = None
    else:
        within = sum(r.total_pulls <= bound for r in ok)
        agg["within_bound"] = within
        agg["within_bound_fraction"] = within / len(ok)
    return agg


def _truth(problem) -> dict:
    out = {"delta": float(problem.delta), "true_values": None, "gaps": None, "best_arm": None}
    out["racing_bound"] = out["lucb_bound"] = None
    try:
        values = problem.true_values
        out["true_values"] = [float(v) for v in values]
        out["gaps"] = [float(g) for g in problem.gaps()]
        out["best_arm"] = int(problem.best_arm)
        out["racing_bound"] = int(problem.racing_bound())
        out["lucb_bound"] = int(problem.lucb_bound())
    except (PurexError, ArithmeticError, ValueError):
        pass
    return out


def _num(x):
    """An int when integral, else a float; keeps reports compact and exact."""
    x = float(x)
    if math.isfinite(x) and x == int(x):
        return int(x)
    return x


def write(report: Report, path, fmt: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(report.render(fmt))
