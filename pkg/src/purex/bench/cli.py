"""Command-line entry point: ``purex run | check | sweep | bound``.

Exit codes: 0 on success, 1 when a check fails, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from purex.bench import checks, config, report, runner
from purex.bench import sweep as sweep_mod
from purex.errors import ConfigError, PurexError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="purex", description="Best-arm identification with distributional rewards.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run seeded replications of one experiment")
    r.add_argument("--config", required=True, help="experiment TOML file")
    r.add_argument("--seed", type=int, help="base seed (overrides run.seed)")
    r.add_argument("--reps", type=int, help="replications (overrides run.replications)")
    _output_args(r)
    r.add_argument("--quiet", action="store_true", help="no progress on stderr")

    c = sub.add_parser("check", help="run a built-in validation suite")
    c.add_argument("suite", choices=checks.SUITE_NAMES + ("all",))
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--corrupt", choices=sorted(checks.CORRUPTIONS), help="negative control: break one function first")

    s = sub.add_parser("sweep", help="repeat an experiment over a grid of one parameter")
    s.add_argument("--config", required=True)
    s.add_argument("--vary", required=True, metavar="KEY=V1,V2,...", help="dotted config key and values")
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=int)
    _output_args(s)

    b = sub.add_parser("bound", help="print the theoretical sample-complexity bounds")
    b.add_argument("--config", required=True)
    return p


def _output_args(p):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=config.FORMATS, help="report format (overrides run.format)")


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = config.load(args.config)
    if args.reps is not None and args.reps < 1:
        raise ConfigError("must be at least 1", "--reps")
    fmt = args.format or cfg.format
    out = args.out or cfg.out
    progress = None
    if not args.quiet:
        progress = lambda rep: print(_progress_line(rep), file=sys.stderr)  # noqa: E731
    rep = report.build(runner.run(cfg, seed=args.seed, reps=args.reps, progress=progress))
    _emit(rep.render(fmt), out)
    if out:
        a = rep.aggregates
        print(f"wrote {out}: error_rate={a['error_rate']} T_mean={a['T_mean']} failures={a['failures']}")
    return EXIT_OK


def _progress_line(rep) -> str:
    if rep.failed:
        return f"rep {rep.index}: failed ({rep.error})"
    r = rep.result
    return f"rep {rep.index}: arm {r.output_arm} after {r.total_pulls} pulls ({r.stop_reason})"


def cmd_check(args) -> int:
    results = checks.run_suite(args.suite, seed=args.seed, corrupt=args.corrupt, progress=lambda r: print(r.line(), flush=True))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = config.load(args.config)
    key, values = sweep_mod.parse_vary(args.vary)
    res = sweep_mod.sweep(cfg, key, values, seed=args.seed, reps=args.reps)
    _emit(res.render(args.format or cfg.format), args.out)
    if args.out:
        print(json.dumps(res.summary, indent=2))
    return EXIT_OK


def cmd_bound(args) -> int:
    p = config.load(args.config).problem
    try:
        doc = {
            "delta": p.delta,
            "true_values": [float(v) for v in p.true_values],
            "best_arm": p.best_arm,
            "gaps": [float(g) for g in p.gaps()],
            "racing_bound": p.racing_bound(),
            "lucb_bound": p.lucb_bound(),
        }
    except PurexError as exc:
        raise ConfigError(str(exc), "arms") from None
    print(json.dumps(doc, indent=2))
    return EXIT_OK


_COMMANDS = {"run": cmd_run, "check": cmd_check, "sweep": cmd_sweep, "bound": cmd_bound}


if __name__ == "__main__":
    sys.exit(main())
