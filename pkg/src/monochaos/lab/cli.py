"""monochaos command line.

    monochaos <kind> --config FILE [--out DIR] [--seed N] [--no-figures]

Exit status: 0 when the run completes, 2 when a theorem run reports a
violation candidate, 1 on any error (the message names the offending field).
"""
from __future__ import annotations

import argparse
import sys

from ..expr import ExprError
from .config import KINDS, ConfigError, ExperimentConfig
from .experiments import EXIT_ERROR, run

HELP = {
    "simulate": "iterate a map or integrate a flow; optional Poincare section",
    "certify": "interval certificate of monotonicity or cooperativity on a box",
    "attract": "attracting set, attraction probes, periodic orbit search",
    "chaos": "sensitivity, Lyapunov exponent, coverage and periodic density",
    "sft": "Devaney and Touhey checks on a shift of finite type",
    "theorem": "no-chaos theorem pipeline on one system or a random sweep",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monochaos", description="Monotone dynamics and chaos laboratory.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=HELP[kind])
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--out", default="out", help="output root (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config, seed_override=args.seed)
        if cfg.kind != args.kind:
            raise ConfigError("kind", f"config is a '{cfg.kind}' experiment, not '{args.kind}'")
        code, out_dir = run(cfg, args.out, figures=not args.no_figures)
    except (ConfigError, ExprError, ValueError, OSError) as exc:
        print(f"monochaos: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(out_dir)
    return code


if __name__ == "__main__":
    sys.exit(main())
