#!/usr/bin/env python3
"""Run one or more entries of the benchmark registry and write the result
tables under results/.

Usage:
    python scripts/run_benchmarks.py table3 fig4
    python scripts/run_benchmarks.py --list
    python scripts/run_benchmarks.py --all --out results
"""

import argparse
import sys

from rankedrange.cli import REPRO_REGISTRY, main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", help="registry entries to run")
    parser.add_argument("--list", action="store_true",
                        help="print the available entries and exit")
    parser.add_argument("--all", action="store_true")
    parser.add_argument("--out", default="results")
    parser.add_argument("--subsample", type=int, default=10000,
                        help="training-set cap for the large benchmarks")
    args = parser.parse_args()

    if args.list:
        print("\n".join(sorted(REPRO_REGISTRY)))
        return 0
    names = sorted(REPRO_REGISTRY) if args.all else args.names
    if not names:
        parser.error("give registry names, --all, or --list")
    for name in names:
        print(f"== {name} ==", flush=True)
        code = cli_main(["repro", name, "--out", args.out,
                         "--subsample", str(args.subsample)])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
