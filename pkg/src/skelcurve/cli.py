"""Command line: ``skelcurve run CONFIG`` and ``skelcurve examples list|export NAME``.

Exit codes: 0 verdict PASS, 2 certified failure, 3 search exhausted,
4 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .catalog import CATALOG, get_example
from .config import load_config
from .emit import csv_text, svg_text, write_text
from .errors import ConfigError
from .pipeline import EXIT_CONFIG, run_pipeline


def _beta(text: str) -> tuple[int, ...]:
    try:
        beta = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated +1/-1 values, got {text!r}") from None
    if any(b not in (1, -1) for b in beta):
        raise argparse.ArgumentTypeError("beta entries must be +1 or -1")
    return beta


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skelcurve", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="certify a job and sample its curve")
    run.add_argument("config", help="job configuration (JSON); a built-in name also works")
    run.add_argument("--depth", type=int, help="curve depth (overrides the config)")
    run.add_argument("--svg", help="write the curve as SVG")
    run.add_argument("--csv", help="write t,x,y samples as CSV")
    run.add_argument("--report", help="write the report here instead of stdout")
    run.add_argument("--beta", type=_beta, help="restrict the search to one orientation, e.g. 1,-1,-1")
    run.add_argument("--seed", type=int, help="seed for the Hoelder diagnostic")
    run.add_argument("--color-states", action="store_true", help="one SVG color per initial edge")
    run.add_argument("--no-diagnostics", action="store_true", help="skip Hoelder/convergence checks")

    ex = sub.add_parser("examples", help="built-in examples")
    exsub = ex.add_subparsers(dest="action", required=True)
    exsub.add_parser("list", help="list built-in examples")
    exp = exsub.add_parser("export", help="print an example's JSON config")
    exp.add_argument("name", choices=sorted(CATALOG))
    return p


def _run(args) -> int:
    try:
        config = get_example(args.config) if args.config in CATALOG else load_config(args.config)
        config.budgets = config.budgets.with_env()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.depth is not None and args.depth < 0:
        print("error: --depth must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    result = run_pipeline(config, depth=args.depth, beta=args.beta, seed=args.seed,
                          diagnostics=not args.no_diagnostics)
    text = result.report.render()
    report_path = args.report or config.outputs.report
    if report_path:
        write_text(report_path, text)
    else:
        sys.stdout.write(text)
    if result.curve is not None:
        svg = args.svg or config.outputs.svg
        if svg:
            extra = [s(p) for s in result.gifs.ifs.maps for p in result.skeleton.points]
            color = args.color_states or config.outputs.color_states
            write_text(svg, svg_text(result.curve, color_states=color, extra_points=extra))
        out_csv = args.csv or config.outputs.csv
        if out_csv:
            write_text(out_csv, csv_text(result.curve))
    return result.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    if args.action == "list":
        for name, make in CATALOG.items():
            cfg = make()
            print(f"{name}\t{cfg.mode}\t{cfg.description}")
        return 0
    sys.stdout.write(get_example(args.name).to_json() + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
