"""Run every preset through the CLI and print one line per preset.

    python3 scripts/run_all_presets.py --out results --seed 0
"""

import argparse
import sys
import time
from pathlib import Path

from dvlab import cli
from dvlab.experiments import PRESETS


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results", help="parent directory for per-preset outputs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", nargs="*", help="subset of presets to run")
    args = p.parse_args()
    status = 0
    for name in args.only or PRESETS:
        t0 = time.perf_counter()
        code = cli.main([name, "--out", str(Path(args.out) / name), "--seed", str(args.seed)])
        print(f"{name:18s} exit {code}  {time.perf_counter() - t0:6.1f} s")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
