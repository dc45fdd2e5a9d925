"""Command line entry point.

    beamalign run [--config FILE] [--seed S] [--trials N] [--tmax T]
    beamalign sweep --axis kappa --values 2,4,8
    beamalign figure 4 --profile desk --out fig4.csv

Results go to ``--out`` (stdout when omitted) as CSV or JSON.
"""
from __future__ import annotations

import argparse
import logging
import sys

from beamalign.errors import ConfigurationError, InputError
from beamalign.harness import sweeps
from beamalign.harness.config import load_config, profile
from beamalign.harness.results import emit_results, to_csv, to_json
from beamalign.harness.trials import detection_curve

log = logging.getLogger("beamalign")


def _parse_values(axis: str, text: str) -> list:
    """Axis values: comma separated scalars, or ';' separated tuples for ``product``."""
    try:
        if axis == "product":
            return [tuple(int(x) for x in grp.split(",")) for grp in text.split(";") if grp.strip()]
        if axis == "alpha":
            return [float(x) for x in text.split(",") if x.strip()]
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse values {text!r} for axis {axis}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--profile", choices=["desk", "paper"], default="desk")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int)
    common.add_argument("--tmax", type=int, help="last training period in slots")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="beamalign",
                                description="Beam alignment by non-negative least squares.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single detection curve")
    sw = sub.add_parser("sweep", parents=[common], help="one curve per parameter value")
    sw.add_argument("--axis", required=True, choices=sweeps.AXES)
    sw.add_argument("--values", required=True,
                    help="comma separated values; product tuples separated by ';'")
    fg = sub.add_parser("figure", parents=[common], help="named reproduction preset")
    fg.add_argument("fig", type=int, choices=sorted(sweeps.FIGURES))
    return p


def _config(args):
    cfg = profile(args.profile)
    if args.config:
        cfg = load_config(args.config, cfg)
    changes = {}
    for flag, key in (("seed", "master_seed"), ("trials", "trials"), ("tmax", "t_max"),
                      ("out", "output"), ("format", "format"), ("workers", "workers")):
        val = getattr(args, flag)
        if val is not None:
            changes[key] = val
    return cfg.replace(**changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        if args.command == "run":
            results = [detection_curve(cfg, cfg.experiment)]
        elif args.command == "sweep":
            results = sweeps.sweep(cfg, args.axis, _parse_values(args.axis, args.values))
        else:
            results = sweeps.run_figure(args.fig, cfg, args.profile)
        if cfg.output:
            emit_results(results, cfg.format, cfg.output)
            log.info("wrote %d curves to %s", len(results), cfg.output)
        else:
            sys.stdout.write(to_csv(results) if cfg.format == "csv" else to_json(results) + "\n")
    except (ConfigurationError, InputError) as e:
        print(f"beamalign: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"beamalign: I/O error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
