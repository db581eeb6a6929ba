"""Command-line entry point.

Exit codes: 0 success, 1 a checked property was violated, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .experiment import default_output_dir, run_experiment
from .generate import GeneratorParams, generate_flowset
from .io import dump_flowset, load_flowset
from .progression import BudgetExhausted, DEFAULT_BUDGET, count_series, series_bounds
from .rta import X_POLICIES, analyze_all, dominance_check
from .sim import (check_trace, periodic_releases, simulate, sporadic_releases,
                  synchronous_releases)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sp2noc", description="SP2 network-on-chip analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="response-time bounds as CSV")
    a.add_argument("flowset")
    a.add_argument("--x-policy", choices=X_POLICIES, default="share1")

    s = sub.add_parser("simulate", help="simulate and print the cycle trace")
    s.add_argument("flowset")
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--releases", choices=("sync", "periodic", "sporadic"), default="sync")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="write the trace here instead of stdout")

    e = sub.add_parser("enumerate", help="progression-series bounds for one message")
    e.add_argument("--flits", type=int, required=True)
    e.add_argument("--links", type=int, required=True)
    e.add_argument("--capacity", type=int)
    e.add_argument("--count", action="store_true", help="also count distinct series")
    e.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    g = sub.add_parser("generate", help="write a random flow set")
    g.add_argument("--out", required=True)
    defaults = GeneratorParams()
    for name, value in defaults.to_dict().items():
        g.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)

    x = sub.add_parser("experiment", help="run a seeded sweep from a JSON config")
    x.add_argument("config")
    x.add_argument("--out-dir")
    return p


def _analyze(args) -> int:
    fs = load_flowset(args.flowset)
    result = analyze_all(fs, x_policy=args.x_policy)
    sys.stdout.write(result.to_csv())
    report = dominance_check(fs)
    for v in report.violations:
        print(f"dominance violation: {v}", file=sys.stderr)
    return 0 if report.ok else 1


def _simulate(args) -> int:
    fs = load_flowset(args.flowset)
    if args.releases == "sync":
        rel = synchronous_releases(fs, args.horizon)
    elif args.releases == "periodic":
        rel = periodic_releases(fs, args.horizon, [args.seed % f.period for f in fs])
    else:
        rel = sporadic_releases(fs, args.horizon, args.seed)
    trace = simulate(fs, rel, args.horizon)
    text = trace.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    status = 0
    for v in check_trace(trace, fs):
        print(f"invariant violation: t={v.t} {v.kind} {v.flow_id} {v.detail}", file=sys.stderr)
        status = 1
    bounds = analyze_all(fs).r_sp2()
    index = {f.id: i for i, f in enumerate(fs)}
    for m in trace.misses():
        if index[m.flow_id] in bounds:
            print(f"sufficiency violation: {m.flow_id} missed at t={m.t}", file=sys.stderr)
            status = 1
    return status


def _enumerate(args) -> int:
    lo, hi = series_bounds(args.flits, args.links, args.capacity, budget=args.budget)
    line = f"min={lo},max={hi}"
    if args.count:
        line += f",count={count_series(args.flits, args.links, args.capacity, budget=args.budget)}"
    print(line)
    return 0


def _generate(args) -> int:
    params = GeneratorParams(**{k: getattr(args, k) for k in GeneratorParams().to_dict()})
    dump_flowset(generate_flowset(params), args.out)
    return 0


def _experiment(args) -> int:
    path = Path(args.config)
    config = json.loads(path.read_text(encoding="utf-8"))
    report = run_experiment(config, base_dir=path.parent)
    out = Path(args.out_dir) if args.out_dir else default_output_dir(config, path.parent)
    report.write(out)
    print(json.dumps(report.totals(), sort_keys=True))
    return 0 if report.ok else 1


_COMMANDS = {
    "analyze": _analyze,
    "simulate": _simulate,
    "enumerate": _enumerate,
    "generate": _generate,
    "experiment": _experiment,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError, BudgetExhausted) as exc:
        print(f"sp2noc: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
