"""``dvlab <preset|custom> --config cfg.json --out dir [--seed k]``.

Writes ``summary.json`` (one pass/fail entry per assertion) plus the CSV and JSON
artifacts of the experiment, and exits with status 0 iff every assertion passed.
Set ``DVLAB_CACHE_DIR`` to relocate the weight and sieve caches.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .experiments import PRESETS, ExperimentConfig, Report, run

log = logging.getLogger("dvlab")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))  # shortest round-trip representation
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=1, sort_keys=True)
        fh.write("\n")


def emit(report: Report, cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Write every artifact of ``report`` under ``out``; returns the paths written."""
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in sorted(report.tables.items()):
        write_csv(out / name, table.header, table.rows)
        written.append(out / name)
    for name, doc in sorted(report.documents.items()):
        write_json(out / name, doc)
        written.append(out / name)
    summary = {
        "experiment": report.name,
        "config": cfg.to_dict(),
        "passed": report.passed,
        "assertions": [{"name": a.name, "passed": a.passed, "paper_ref": a.paper_ref, "detail": a.detail}
                       for a in report.assertions],
        "artifacts": sorted(p.name for p in written),
    }
    write_json(out / "summary.json", summary)
    written.append(out / "summary.json")
    return written


def load_config(name: str, path: str | None, out: str, seed: int | None) -> ExperimentConfig:
    blob = {}
    if path:
        with open(path) as fh:
            blob = json.load(fh)
    known = {"measure", "N", "grid", "seed", "params"}
    unknown = set(blob) - known - {"name"}
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = {k: blob[k] for k in known if k in blob}
    if seed is not None:
        kw["seed"] = seed
    return ExperimentConfig(name=name, output_dir=out, **kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dvlab", description=__doc__.split("\n\n")[1].replace("\n", " "))
    p.add_argument("experiment", help=f"one of: {', '.join(PRESETS)}, custom")
    p.add_argument("--config", help="JSON file with measure, N, grid, seed and params")
    p.add_argument("--out", default="dvlab-out", help="output directory")
    p.add_argument("--seed", type=int, help="overrides the seed in the config")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.experiment, args.config, args.out, args.seed)
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"dvlab: invalid configuration: {exc}", file=sys.stderr)
        return 2
    log.info("running %s", cfg.name)
    report = run(cfg)
    try:
        emit(report, cfg, Path(cfg.output_dir))
    except OSError as exc:
        print(f"dvlab: cannot write results: {exc}", file=sys.stderr)
        return 3
    for a in report.assertions:
        print(f"{'PASS' if a.passed else 'FAIL'}  {a.name}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
