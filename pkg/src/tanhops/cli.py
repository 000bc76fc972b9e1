"""Command line entry point.

    tanhops <subcommand> --config study.cfg --out results.csv [--workers K]

Exit status: 0 when every check passes, 1 when a check fails, 2 for a bad
config or unwritable output.
"""

from __future__ import annotations

import argparse
import logging
import sys

from tanhops.errors import ConfigError, DomainError
from tanhops.harness import config as cfgmod
from tanhops.harness import studies
from tanhops.harness.report import emit_csv

log = logging.getLogger("tanhops")


def _density(values, workers):
    return studies.run_density_check(cfgmod.density_config(values))


def _converge(values, workers):
    values.setdefault("workers", str(workers))
    return studies.run_convergence_study(cfgmod.convergence_config(values))


def _stability(values, workers):
    values.setdefault("workers", str(workers))
    return studies.run_stability_study(cfgmod.stability_config(values))


def _fractional(values, workers):
    values.setdefault("workers", str(workers))
    cfg = cfgmod.fractional_config(values)
    return studies.run_fractional_study(cfg.convergence.function(), cfg.alpha, cfg)


def _compile(values, workers):
    return studies.run_compile_study(cfgmod.compile_config(values))


def _cascade(values, workers):
    return studies.run_cascade_study(cfgmod.cascade_config(values))


COMMANDS = {
    "density-check": _density,
    "converge": _converge,
    "stability": _stability,
    "fractional": _fractional,
    "compile-net": _compile,
    "cascade": _cascade,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tanhops", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value study config")
        p.add_argument("--out", required=True, help="CSV output path")
        p.add_argument("--workers", type=int, default=1, help="threads for independent cells")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        values = cfgmod.read_key_values(args.config)
        report = COMMANDS[args.command](values, args.workers)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        emit_csv(report, args.out)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2
    failed = sorted(name for name, ok in report.checks.items() if not ok)
    for name in failed:
        log.warning("check failed: %s", name)
    log.info("%s: %d checks, %d failed, wrote %s", args.command, len(report.checks),
             len(failed), args.out)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
