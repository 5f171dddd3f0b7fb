"""Command-line entry point: ``matchsim sweep|plot|verify``."""
from __future__ import annotations

import argparse
import os
import sys

from . import report, sweep, verify

GRID_HELP = "comma list (10,20,40), a:b:ladder (default ladder clipped to [a,b]) or a:b:step"


class UsageError(Exception):
    pass


def _error(message: str) -> None:
    if os.environ.get("NO_COLOR") is None and sys.stderr.isatty():
        prefix = "\033[31merror:\033[0m"
    else:
        prefix = "error:"
    print(f"{prefix} {message}", file=sys.stderr)


def _progress(done: int, total: int) -> None:
    step = max(1, total // 100)
    if done == total or done % step == 0:
        print(f"progress {done}/{total}", file=sys.stderr, flush=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchsim", description="Truncation manipulability of deferred acceptance.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run the (n, k, rho, trial) grid and write CSV")
    p.add_argument("--config", help="INI file with a [sweep] section; flags override it")
    p.add_argument("--n", help=f"market sizes: {GRID_HELP}")
    p.add_argument("--k", help=f"list lengths: {GRID_HELP}")
    p.add_argument("--rho", help="correlation values, comma separated")
    p.add_argument("--trials", type=int, help=f"markets per cell (default {sweep.DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--out", required=True, help="CSV destination")
    p.add_argument("--quiet", action="store_true", help="no progress on stderr")

    p = sub.add_parser("plot", help="aggregate a CSV and render an SVG plot")
    p.add_argument("--in", dest="source", required=True, help="CSV written by 'sweep'")
    p.add_argument("--series", choices=("k", "rho"), default="k", help="dimension shown in the legend")
    p.add_argument("--fix", action="append", default=[], metavar="KEY=VALUE",
                   help="keep only rows with k or rho equal to VALUE (repeatable)")
    p.add_argument("--log-y", action="store_true", help="logarithmic y axis")
    p.add_argument("--title", default="")
    p.add_argument("--out", required=True, help="SVG destination")

    p = sub.add_parser("verify", help="run the brute-force oracle suites")
    p.add_argument("--oracle-n", type=int, default=4, help="largest n for exhaustive checks (max 5)")
    p.add_argument("--cases", type=int, default=1000, help="markets per suite")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _sweep(args) -> int:
    overrides = dict(
        n_values=tuple(sweep.parse_int_grid(args.n)) if args.n else None,
        k_values=tuple(sweep.parse_int_grid(args.k)) if args.k else None,
        rho_values=tuple(sweep.parse_float_list(args.rho)) if args.rho else None,
        trials=args.trials,
        master_seed=args.seed,
        workers=args.workers,
    )
    if args.config:
        config = sweep.SweepConfig.from_file(args.config, **overrides)
    else:
        if overrides["workers"] is None:
            overrides["workers"] = sweep.default_workers()
        config = sweep.SweepConfig(**{k: v for k, v in overrides.items() if v is not None})
    rows = sweep.run_sweep(config, None if args.quiet else _progress)
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    report.write_csv(rows, args.out)
    return 0


def _parse_fix(items, series: str) -> dict:
    fix = {}
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("k", "rho"):
            raise UsageError(f"--fix expects k=VALUE or rho=VALUE, got {item!r}")
        fix[key] = int(value) if key == "k" else float(value)
    if series in fix:
        raise UsageError(f"cannot both fix and vary {series}")
    return fix


def _plot(args) -> int:
    fix = _parse_fix(args.fix, args.series)
    rows = report.read_csv(args.source)
    if not rows:
        raise UsageError(f"{args.source} contains no rows")
    spec = report.PlotSpec(fix=fix, log_y=args.log_y, title=args.title)
    report.render_plot(sweep.aggregate(rows), spec, args.out)
    return 0


def _verify(args) -> int:
    if not 1 <= args.oracle_n <= 5:
        raise UsageError("--oracle-n must be between 1 and 5")
    results = verify.run_all(args.oracle_n, args.cases, args.seed)
    for r in results:
        print(r.summary())
        smallest = r.smallest_failure()
        if smallest is not None:
            print("smallest counterexample:\n" + smallest.to_text(), end="")
    return 0 if all(r.ok for r in results) else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    handlers = {"sweep": _sweep, "plot": _plot, "verify": _verify}
    try:
        return handlers[args.command](args)
    except UsageError as e:
        _error(str(e))
        return 2
    except (ValueError, OSError) as e:
        _error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
