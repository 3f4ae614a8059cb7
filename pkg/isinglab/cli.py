"""isinglab CLI: run experiments and export plot data."""

import argparse
import asyncio
import logging
import sys
from typing import Any, Dict, List, Optional

from isinglab.errors import (EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_SCHEMA, ConfigError, LabError,
                             SchemaMismatchError)
from isinglab.lab.core import ExperimentRunner, emit_plot_data, load_config

logger = logging.getLogger(__name__)

EXPERIMENTS = ("autocorr", "arm", "spectral", "verify", "shellsum", "fit")

# argparse destination -> ExperimentConfig field
FLAG_FIELDS = {
    "dimension": "dimension",
    "sizes": "sizes",
    "shapes": "shapes",
    "boundary": "boundary",
    "ell": "ell",
    "beta": "beta",
    "family": "family",
    "coupling": "coupling",
    "t0": "t0",
    "t_max": "t_max",
    "ratio": "ratio",
    "replicas": "replicas",
    "samples": "samples",
    "functions": "functions",
    "seed": "seed",
    "workers": "workers",
    "window": "window",
    "delta": "delta",
    "eta": "eta",
    "input": "input",
    "output": "output_dir",
}


def _shape(text: str) -> List[int]:
    try:
        return [int(side) for side in text.lower().split("x")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected sides like 2x3, got {text!r}") from exc


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": args.command}
    for dest, name in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            out[name] = value
    return out


async def _cmd_run(args) -> int:
    config = load_config(args.config, _overrides(args))
    result = await ExperimentRunner(config).run()
    for report in result.failed:
        print(f"  FAIL  {report.inequality}: {report.lhs:.6g} vs {report.rhs:.6g}", file=sys.stderr)
    print(f"{config.kind}: {len(result.records)} records -> {result.output_dir}")
    return result.status


def _cmd_plot_data(args) -> int:
    sys.stdout.write(emit_plot_data(args.paths, args.select))
    return EXIT_OK


def _add_experiment_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("-d", "--dimension", type=int, help="Lattice dimension")
    p.add_argument("-L", "--sizes", type=int, nargs="+", help="Side parameters L")
    p.add_argument("--shapes", type=_shape, nargs="+", help="Box shapes, e.g. 2x2 2x3")
    p.add_argument(
        "--boundary",
        choices=["plus", "minus", "free", "periodic"],
        help="Boundary condition (default depends on the experiment)",
    )
    p.add_argument("--ell", type=float, help="Block scale for the block grid")
    p.add_argument("--beta", type=float, help="Inverse temperature (default: critical)")
    p.add_argument("--family", help="Rate family: heatbath or metropolis")
    p.add_argument("--coupling", choices=["uniformized", "monotone"], help="Event coupling")
    p.add_argument("--t0", type=float, help="First positive grid time")
    p.add_argument("--t-max", dest="t_max", type=float, help="Last grid time")
    p.add_argument("--ratio", type=float, help="Geometric grid ratio")
    p.add_argument("--replicas", type=int, help="Independent replicas")
    p.add_argument("--samples", type=int, help="Monte Carlo draws per size")
    p.add_argument("--functions", type=int, help="Random test functions per check")
    p.add_argument("--seed", type=int, help="Master seed (LAB_SEED overrides)")
    p.add_argument("-j", "--workers", type=int, help="Worker processes")
    p.add_argument("--window", type=float, nargs=2, metavar=("LOW", "HIGH"), help="Fit window")
    p.add_argument("--delta", type=float, help="Arm exponent for shell sums and schedules")
    p.add_argument("--eta", type=float, help="LSI growth exponent for schedules")
    p.add_argument("-o", "--output", help="Output directory (default: results)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isinglab", description="Critical Ising Glauber dynamics laboratory"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "autocorr": "Monte Carlo autocorrelation <s0, P_t s0> on tori",
        "arm": "Plus-boundary one-arm scaling",
        "spectral": "Spectral gaps and log-Sobolev estimates",
        "verify": "Exact verification of rate axioms and inequalities",
        "shellsum": "Deterministic shell-sum boundedness",
        "fit": "Power-law fits of stored series",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=helps[name])
        _add_experiment_flags(p)
        if name == "fit":
            p.add_argument("input", nargs="?", help="Result file or directory")

    # plot-data
    pd = sub.add_parser("plot-data", help="Tidy CSV of stored series on stdout")
    pd.add_argument("paths", nargs="+", help="Result files or directories")
    pd.add_argument("--select", help="Keep series whose label or experiment contains this")
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        if args.command == "plot-data":
            return _cmd_plot_data(args)
        return asyncio.run(_cmd_run(args))
    except SchemaMismatchError as exc:
        print(f"error: schema mismatch in {exc.path}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc.field}: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    except (LabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
