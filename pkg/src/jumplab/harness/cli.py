"""Command line: run, sweep, verify, fit.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys

from .fitting import MODELS, fit_scaling
from .records import emit_csv, parse_csv, summarize
from .registry import ALGORITHMS
from .runner import RunConfig, SweepConfig, run_single, sweep


def _cmd_run(args) -> int:
    rec = run_single(RunConfig(args.alg, args.n, args.seed, args.ell, args.budget))
    print(json.dumps(rec.to_dict()))
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        cfg = SweepConfig.from_json(fh.read())
    rows = sweep(cfg, workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        emit_csv(rows, fh)
    for s in summarize(rows):
        print(json.dumps(s), file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    from .checks import run_suite

    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def _cmd_fit(args) -> int:
    with open(args.input) as fh:
        rows = parse_csv(fh)
    fit = fit_scaling(rows, args.model)
    print(json.dumps({"model": fit.model, "coefficient": fit.coefficient,
                      "residual": fit.residual, "loglog_slope": fit.slope}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jumplab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one seeded run, RunRecord as JSON")
    r.add_argument("--alg", required=True, choices=sorted(ALGORITHMS))
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--ell", type=int)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--budget", help="total query budget, an expression in n and ell")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="repetitions over several n, CSV out")
    s.add_argument("--config", required=True, help="JSON sweep configuration")
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1, help="worker processes")
    s.set_defaults(func=_cmd_sweep)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=["operators", "stats", "estimators", "e2e"])
    v.set_defaults(func=_cmd_verify)

    f = sub.add_parser("fit", help="fit median queries against a growth model")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--model", default="auto", choices=["auto", *MODELS])
    f.set_defaults(func=_cmd_fit)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
