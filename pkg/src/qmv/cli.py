"""Command-line interface: run, oracle, radius, bench, validate.

Exit codes: 0 success, 2 input/schema problems, 3 infeasible error budgets,
4 resource-cap violations.  Inner parallelism is controlled by --threads or
the QMV_THREADS environment variable and is deterministic at --threads 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import BenchSettings, run_benchmark, write_csv
from .config import load_problem
from .errors import CapacityError, ConfigError, InfeasibleError
from .lightcone import lr_error, max_ball_size, min_radius
from .meanvalue import mean_value, oracle_mean_value

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_RESOURCE = 4


def _resolve_threads(value) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("QMV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"QMV_THREADS: expected an integer, got {env!r}")
    return 1


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def cmd_run(args) -> int:
    problem = load_problem(args.config)
    report = mean_value(problem, threads=_resolve_threads(args.threads))
    _write_json(args.out, report)
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = load_problem(args.config)
    result = oracle_mean_value(problem)
    _write_json(args.out, result)
    return EXIT_OK


def cmd_radius(args) -> int:
    chosen = min_radius(args.time, args.g, args.degree, args.sites,
                        args.budget, args.cap)
    print(f"L = {chosen}")
    print(f"{'L':>4}  {'ball':>6}  {'single-site':>13}  {'n-site total':>13}")
    for radius in range(1, chosen + 3):
        single = lr_error(radius, args.time, args.g, args.degree)
        print(f"{radius:>4}  {max_ball_size(radius):>6}  {single:>13.6e}  "
              f"{args.sites * single:>13.6e}")
    return EXIT_OK


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    allowed = {"trotter", "rk4", "dp5"}
    bad = [m for m in methods if m not in allowed]
    if bad:
        raise ConfigError(f"methods: unknown method(s) {', '.join(bad)}; "
                          f"choose from {', '.join(sorted(allowed))}")
    settings = BenchSettings()
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        bench_doc = doc.get("bench", doc)
        for fld in ("qubit_counts", "repetitions", "instances", "horizon", "g",
                    "trotter_steps", "rk4_steps", "dp5_tol", "seed"):
            if fld in bench_doc:
                setattr(settings, fld, bench_doc[fld])
    if args.repetitions:
        settings.repetitions = args.repetitions
    rows = run_benchmark(methods, settings)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    load_problem(args.config)
    print("configuration is valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmv",
        description="Estimate product-observable mean values of short-time "
                    "2D lattice evolutions via lightcone restriction.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the lightcone estimation pipeline")
    run.add_argument("config", help="path to the JSON configuration")
    run.add_argument("--out", default="-", help="result path ('-' for stdout)")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads for per-site propagators")
    run.set_defaults(func=cmd_run)

    oracle = sub.add_parser("oracle", help="brute-force full-lattice evaluation")
    oracle.add_argument("config")
    oracle.add_argument("--out", default="-")
    oracle.set_defaults(func=cmd_oracle)

    radius = sub.add_parser("radius", help="pick the lightcone radius for a budget")
    radius.add_argument("--time", type=float, required=True)
    radius.add_argument("--g", type=float, required=True,
                        help="per-edge coupling norm bound")
    radius.add_argument("--degree", type=int, default=4)
    radius.add_argument("--sites", type=int, required=True)
    radius.add_argument("--budget", type=float, required=True,
                        help="total truncation budget")
    radius.add_argument("--cap", type=int, default=14,
                        help="maximum lightcone qubit count")
    radius.set_defaults(func=cmd_radius)

    bench = sub.add_parser("bench", help="benchmark propagator methods")
    bench.add_argument("config", nargs="?", default=None,
                       help="optional JSON with a 'bench' settings block")
    bench.add_argument("--methods", default="trotter,rk4,dp5")
    bench.add_argument("--repetitions", type=int, default=None)
    bench.add_argument("--out", default="bench.csv")
    bench.set_defaults(func=cmd_bench)

    validate = sub.add_parser("validate", help="schema-check a configuration")
    validate.add_argument("config")
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
