"""Command-line entry points.

    chemostokes run <config>
    chemostokes sweep <config> --chi 0.05,0.1,0.5 [--out DIR]
    chemostokes check <run-dir>
    chemostokes plot <run-dir>

Exit codes: 0 success, 1 validation error, 2 aborted simulation.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import parse_config
from .errors import SimulationAbort, ValidationError
from .integrator import run
from .io import SUMMARY_FILE, build_summary, read_series, write_run_outputs
from .plots import emit_plots
from .sweep import run_sweep


def _default_out(config_path, suffix: str) -> str:
    stem = os.path.splitext(os.path.basename(str(config_path)))[0]
    return os.path.join(os.path.dirname(str(config_path)) or ".", f"{stem}_{suffix}")


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    out_dir = config.output_dir or _default_out(args.config, "out")
    try:
        result = run(config)
    except SimulationAbort as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            write_run_outputs(partial, config, out_dir)
        print(f"aborted: {exc}", file=sys.stderr)
        print(f"partial outputs in {out_dir}", file=sys.stderr)
        return 2
    write_run_outputs(result, config, out_dir)
    print(f"run complete: {result.monitors.steps} steps, "
          f"{result.monitors.wall_seconds:.1f} s, outputs in {out_dir}")
    return 0


def _cmd_sweep(args) -> int:
    config = parse_config(args.config)
    chi_values = [float(v) for v in args.chi.split(",") if v.strip()]
    out_dir = args.out or config.output_dir or _default_out(args.config, "sweep")
    summary = run_sweep(config, chi_values, out_dir)
    print(summary.table(), end="")
    print(f"sweep outputs in {out_dir}")
    return 0


def _cmd_check(args) -> int:
    series = read_series(args.run_dir)
    text = build_summary(series)
    with open(os.path.join(args.run_dir, SUMMARY_FILE), "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")
    return 0


def _cmd_plot(args) -> int:
    series = read_series(args.run_dir)
    for path in emit_plots(series, args.run_dir):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemostokes",
        description="Two-species chemotaxis-Stokes simulator and diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation from a config file")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run a chi sweep from a base config")
    p.add_argument("config")
    p.add_argument("--chi", required=True,
                   help="comma-separated ascending positive sensitivities")
    p.add_argument("--out", default="", help="sweep output directory")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("check", help="re-evaluate decay reports for a stored run")
    p.add_argument("run_dir")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("plot", help="plot a stored run")
    p.add_argument("run_dir")
    p.set_defaults(fn=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
