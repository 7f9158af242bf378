"""Command-line experiment runner.

Subcommands:
  run    --config PATH [--out-trace PATH] [--out-summary PATH]
  sweep  --config PATH --horizons a,b,c [--out PATH]
  check  --suite {oracle,lemmas,ledger,xi,grid} --cases N [--seed S]

Exit codes: 0 success, 1 property failure, 2 config error, 3 runtime
assertion (overflow guard, assumption violation).  The environment variable
OCO_SEED overrides the config seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cmd import StepOverflowError
from .experiments import CHECK_SUITES, ConfigError, run_experiment, sweep_experiment
from .harness import RegretTrace
from .memory import AssumptionViolationError

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ASSERTION = 3


def write_trace_csv(trace: RegretTrace, path: str) -> None:
    """Plain CSV, '.' decimals, LF endings, shortest-roundtrip floats: the
    same run always produces a byte-identical file."""
    with open(path, "w", newline="\n") as f:
        f.write(",".join(RegretTrace.COLUMNS) + "\n")
        for r in trace.rows:
            f.write(
                f"{r.t},{r.lambda_t!r},{r.loss!r},{r.move_cost!r},"
                f"{r.comp_loss!r},{r.comp_move!r},{r.regret_asym!r},"
                f"{r.regret_sym!r},{r.w_norm!r},{r.epoch_index},{r.current_L!r}\n"
            )


def _load_config(path: str) -> dict:
    try:
        with open(path) as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "OCO_SEED" in os.environ:
        config["seed"] = int(os.environ["OCO_SEED"])
    return config


def cmd_run(args) -> int:
    config = _load_config(args.config)
    trace, summary = run_experiment(config)
    if args.out_trace:
        write_trace_csv(trace, args.out_trace)
    if args.out_summary:
        with open(args.out_summary, "w", newline="\n") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
            f.write("\n")
    print(f"{summary['name']}: T={summary['T']} "
          f"regret_asym={summary['regret_asym']:.6g} "
          f"regret_sym={summary['regret_sym']:.6g} "
          f"move_cost={summary['total_move_cost']:.6g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    horizons = [int(x) for x in args.horizons.split(",") if x.strip()]
    out = sweep_experiment(config, horizons)
    if args.out:
        with open(args.out, "w", newline="\n") as f:
            json.dump(out, f, indent=2, sort_keys=True)
            f.write("\n")
    slope = out.get("growth_slope")
    slope_str = f"{slope:.4f}" if slope is not None else "undefined"
    print(f"{out['name']}: horizons={out['horizons']} growth_slope={slope_str}")
    for p in out["points"]:
        print(f"  T={p['T']}: regret_asym={p['regret_asym']:.6g}")
    return EXIT_OK


def cmd_check(args) -> int:
    if args.cases < 1:
        raise ConfigError(f"--cases must be >= 1, got {args.cases}")
    suite = CHECK_SUITES[args.suite]
    failures = suite(args.cases, args.seed)
    if failures:
        print(f"check {args.suite}: {len(failures)}/{args.cases} FAILED (seed={args.seed})")
        for msg in failures[:20]:
            print(f"  {msg}")
        return EXIT_PROPERTY_FAILURE
    print(f"check {args.suite}: {args.cases} cases passed (seed={args.seed})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movoco", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out-trace", default=None)
    p_run.add_argument("--out-summary", default=None)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a config over several horizons")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--horizons", required=True, help="comma-separated list, e.g. 256,1024,4096")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("check", help="run a property-check suite")
    p_check.add_argument("--suite", required=True, choices=sorted(CHECK_SUITES))
    p_check.add_argument("--cases", type=int, required=True)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (StepOverflowError, AssumptionViolationError, FloatingPointError) as exc:
        print(f"runtime assertion: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
