"""Run every shipped study config and write one CSV per study.

    python3 scripts/run_all_studies.py [--out results] [--workers 4]

Exits non-zero if any study reports a failed check or a bad config.
"""

import argparse
import sys
import time
from pathlib import Path

from tanhops.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent

STUDIES = [
    ("density-check", "density.cfg"),
    ("converge", "converge_sin.cfg"),
    ("converge", "converge_poly3.cfg"),
    ("converge", "converge_flat.cfg"),
    ("converge", "converge_kantorovich.cfg"),
    ("stability", "stability.cfg"),
    ("fractional", "fractional.cfg"),
    ("compile-net", "compile.cfg"),
    ("cascade", "cascade.cfg"),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(ROOT / "results"))
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for command, cfg in STUDIES:
        target = out / (Path(cfg).stem + ".csv")
        start = time.perf_counter()
        code = cli_main([command, "--config", str(ROOT / "configs" / cfg), "--out", str(target),
                         "--workers", str(args.workers)])
        print(f"{command:14s} {cfg:28s} exit={code} {time.perf_counter() - start:6.2f}s -> {target}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
