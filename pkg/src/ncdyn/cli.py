"""Command line entry point: ``ncdyn <scenario.cfg>... [--out DIR] [--seed U64]``.

Exit status: 0 on success, 2 on configuration errors (nothing is written),
3 on solver failure (``report.json`` records the failing time stamp).
With several scenario files each run writes to ``DIR/<file stem>`` and up to
``NCDYN_THREADS`` runs execute concurrently.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, _check_seed, load
from .kinetic import KineticFailure
from .mechanics import BlowUpError
from .scenarios import RUNNERS

log = logging.getLogger("ncdyn")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def write_series(path: Path, header, columns: np.ndarray):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in columns:
            fh.write(",".join(format(float(x), ".17g") for x in row) + "\n")


def _write_report(path: Path, body: dict):
    path.write_text(json.dumps(body, indent=2, sort_keys=True, allow_nan=True) + "\n")


def run(config: ScenarioConfig, out_dir) -> int:
    """Execute one scenario and write its outputs into ``out_dir``."""
    out = Path(out_dir)
    rng = np.random.default_rng(config.seed)
    try:
        outcome = RUNNERS[config.kind](config.params, rng)
    except (BlowUpError, KineticFailure) as exc:
        out.mkdir(parents=True, exist_ok=True)
        _write_report(out / "report.json", {
            "status": "solver_failure",
            "error": str(exc),
            "t_fail": exc.t,
            "parameters": config.echo(),
        })
        log.error("solver failure at t=%.17g: %s", exc.t, exc)
        return EXIT_SOLVER

    out.mkdir(parents=True, exist_ok=True)
    if outcome.columns is not None:
        write_series(out / "series.csv", outcome.header, outcome.columns)
    for name, (header, cols) in outcome.extra_series.items():
        write_series(out / name, header, cols)
    _write_report(out / "report.json", {
        "status": "ok",
        "kind": config.kind,
        "parameters": config.echo(),
        "results": outcome.report,
    })
    return EXIT_OK


def _run_path(path: str, out_dir: Path, seed) -> int:
    try:
        cfg = load(path)
        if seed is not None:
            cfg.seed = seed
    except ConfigError as exc:
        key = f" (key {exc.key!r})" if exc.key else ""
        print(f"ncdyn: {path}: {exc}{key}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, out_dir)


def _parse_seed(text: str) -> int:
    try:
        return _check_seed(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ncdyn", description=__doc__.split("\n")[0])
    parser.add_argument("scenarios", nargs="+", help="scenario .cfg files (or report.json to replay a run)")
    parser.add_argument("--out", default=None, help="output directory (default: out/<stem>)")
    parser.add_argument("--seed", type=_parse_seed, default=None, help="override the scenario seed (u64)")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"ncdyn {__version__}")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")

    paths = args.scenarios
    if len(paths) == 1:
        out = Path(args.out) if args.out else Path("out") / Path(paths[0]).stem
        return _run_path(paths[0], out, args.seed)

    base = Path(args.out) if args.out else Path("out")
    stems = [Path(p).stem for p in paths]
    if len(set(stems)) != len(stems):
        print("ncdyn: scenario files in a sweep need distinct names", file=sys.stderr)
        return EXIT_CONFIG
    try:
        workers = max(1, int(os.environ.get("NCDYN_THREADS", "1")))
    except ValueError:
        print("ncdyn: NCDYN_THREADS must be a positive integer", file=sys.stderr)
        return EXIT_CONFIG
    with ThreadPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(lambda p: _run_path(p, base / Path(p).stem, args.seed), paths))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
