#!/usr/bin/env python3
"""Run every figure-reproduction experiment into an output directory.

Usage:
    python scripts/run_figures.py [--out OUT_DIR] [--seed SEED] [--config FILE]

Produces one CSV plus a run manifest per figure (fig16 .. fig21), using the
published parameter-table defaults unless a config file overrides them.
"""

import argparse
import sys

from hybridnet import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", default=None)
    args = parser.parse_args()

    for name in cli.EXPERIMENTS:
        argv = ["experiment", name, "--seed", str(args.seed), "--out", args.out]
        if args.config:
            argv += ["--config", args.config]
        code = cli.main(argv)
        if code != 0:
            print(f"{name} failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
