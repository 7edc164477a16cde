"""Command-line interface.

Subcommands: evolve, beta-scan, opt-depth, boundary, appendix, gate-analyze,
compare.  Configuration comes from an optional flat key=value file
(--config), overridden by repeated --set key=value flags and then by the
dedicated flags.  Tables land in the output directory as CSV with a '#'
metadata header plus a JSON mirror; --figures additionally renders PNG plots
alongside them.  The default output directory is taken from the
PAULIWEIGHT_OUTPUT_DIR environment variable, falling back to the current
directory.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant
violation, 4 cross-engine tolerance failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, figures
from .experiments import (CommandResult, ConfigError, ExperimentConfig,
                          NumericsError, ToleranceError)
from .io_utils import parse_config, parse_overrides, write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_TOLERANCE = 4

OUTPUT_DIR_ENV = "PAULIWEIGHT_OUTPUT_DIR"

CONFIG_FLAGS = (
    "engine", "gate", "alpha", "j", "i1", "i2", "n", "depth", "boundary",
    "initial", "site", "k", "center", "samples", "seed", "max_bond",
    "cutoff", "format",
)


def _parse_floats(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def _parse_ints(text: str):
    return [int(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pauliweight",
        description="Pauli-weight dynamics in locally scrambled brick-wall "
                    "circuits: occupation fields, shadow norms, optimal-depth "
                    "scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a single config key (repeatable)")
        p.add_argument("--output-dir",
                       default=os.environ.get(OUTPUT_DIR_ENV, "."),
                       help="directory for output tables")
        p.add_argument("--figures", action="store_true",
                       help="also render PNG figures next to the tables")
        for flag in CONFIG_FLAGS:
            p.add_argument("--" + flag.replace("_", "-"), dest="cfg_" + flag,
                           default=None, help=argparse.SUPPRESS)
        return p

    common(sub.add_parser("evolve", help="occupation field and shadow norms"))

    p = common(sub.add_parser("beta-scan",
                              help="beta(t) scan with Clifford baseline"))
    p.add_argument("--alphas", default="0.16667 0.33333 0.66667",
                   help="space- or comma-separated alpha values")
    p.add_argument("--depths", default="1 2 3 4 6 8 12 16 20",
                   help="depths at which to record beta")

    p = common(sub.add_parser("opt-depth",
                              help="optimal depth t*(k, alpha) scan and fits"))
    p.add_argument("--ks", default="4 6 8 12 16 24 32 48 64",
                   help="operator sizes")
    p.add_argument("--alphas", default="0.2 0.28 0.36 0.44 0.52 0.65",
                   help="alpha values")

    p = common(sub.add_parser("boundary",
                              help="open-boundary deviation from 3/4, "
                                   "dual-unitary vs Clifford"))
    p.add_argument("--depths", default="2 4 6", help="depth slices to record")

    common(sub.add_parser("appendix",
                          help="bound slack and variance diagnostics"))

    p = common(sub.add_parser("gate-analyze",
                              help="entanglement coordinates of gate files"))
    p.add_argument("gate_files", nargs="+", help="gate matrix files")

    common(sub.add_parser("compare",
                          help="cross-engine agreement on one config"))
    return parser


def load_config(args) -> ExperimentConfig:
    mapping = {}
    if args.config:
        mapping.update(parse_config(args.config))
    mapping.update(parse_overrides(args.set))
    for flag in CONFIG_FLAGS:
        value = getattr(args, "cfg_" + flag, None)
        if value is not None:
            mapping[flag] = value
    return ExperimentConfig.from_mapping(mapping)


def run_command(args) -> tuple[CommandResult, str]:
    if args.command == "gate-analyze":
        return experiments.cmd_gate_analyze(args.gate_files), "gate_analyze"
    cfg = load_config(args)
    if args.command == "evolve":
        return experiments.cmd_evolve(cfg), "evolve"
    if args.command == "beta-scan":
        return experiments.cmd_beta_scan(
            cfg, _parse_floats(args.alphas), _parse_ints(args.depths)), "beta_scan"
    if args.command == "opt-depth":
        return experiments.cmd_opt_depth(
            cfg, _parse_ints(args.ks), _parse_floats(args.alphas)), "opt_depth"
    if args.command == "boundary":
        return experiments.cmd_boundary(cfg, _parse_ints(args.depths)), "boundary"
    if args.command == "appendix":
        return experiments.cmd_appendix(cfg), "appendix"
    if args.command == "compare":
        return experiments.cmd_compare(cfg), "compare"
    raise ConfigError(f"unknown command {args.command!r}")


def write_result(result: CommandResult, stem: str, args) -> list:
    outdir = args.output_dir
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name, meta, cols, rows in result.tables:
        path = os.path.join(outdir, f"{stem}_{name}.csv")
        write_table(path, meta, cols, rows)
        paths.append(path)
    if args.figures:
        paths.extend(figures.render(args.command, result, outdir))
    return paths


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, stem = run_command(args)
        paths = write_result(result, stem, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericsError, FloatingPointError) as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ToleranceError as exc:
        partial = getattr(exc, "result", None)
        if partial is not None:
            write_result(partial, "compare", args)
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    for path in paths:
        print(path)
    for key, value in result.summary.items():
        print(f"{key} = {value:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
