"""Command-line entry point.

Subcommands:
    run <config>       execute one scenario from a YAML/JSON config file
    list               print the registered scenarios
    validate <config>  check a config without running it
    sweep <config>     cartesian parameter sweep, one table per grid point

Config schema (YAML mapping):
    scenario: <registered name>            # required
    params:   {<scenario parameters>}      # optional, merged over defaults
    seed:     <int>                        # required for stochastic scenarios
    sweep:    {<param>: [values, ...]}     # used by the sweep subcommand
    output:   <basename>                   # optional output file stem

Exit codes: 0 success, 2 config/schema error, 3 unknown scenario,
4 physics/domain error, 1 internal error. Errors are reported to stderr as a
single JSON object {"category": ..., "message": ...}.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from .dispersion import OutOfBandError
from .geometry import CoincidentEmittersError
from .results import ResultTable
from .scenarios import SCENARIOS, ScenarioError, run_scenario, validate_config

_EXIT_BY_CATEGORY = {
    "config": 2,
    "unknown-scenario": 3,
    "physics": 4,
    "internal": 1,
}


def _fail(category: str, message: str) -> int:
    print(json.dumps({"category": category, "message": message}), file=sys.stderr)
    return _EXIT_BY_CATEGORY.get(category, 1)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read config file {path}: {exc}", "config")
    try:
        config = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"malformed config{where}: {exc}", "config")
    if not isinstance(config, dict):
        raise ScenarioError("config root must be a mapping", "config")
    return config


def _write_table(table: ResultTable, out_dir: Path, stem: str, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.{fmt}"
    if fmt == "csv":
        table.to_csv(path)
    else:
        table.to_json(path)
    return path


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    table = run_scenario(config)
    stem = config.get("output") or config["scenario"]
    path = _write_table(table, Path(args.out_dir), stem, args.format)
    print(path)
    return 0


def _cmd_list(args) -> int:
    for name in sorted(SCENARIOS):
        print(f"{name:24s} {SCENARIOS[name].description}")
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    validate_config(config)
    print("ok")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    grid = config.get("sweep")
    if not isinstance(grid, dict) or not grid:
        raise ScenarioError("sweep subcommand needs a non-empty 'sweep' mapping",
                            "config")
    names = sorted(grid)
    values = [list(grid[n]) for n in names]
    points = list(itertools.product(*values))
    stem = config.get("output") or config["scenario"]
    out_dir = Path(args.out_dir)

    def run_point(idx_point):
        idx, point = idx_point
        cfg = {
            "scenario": config["scenario"],
            "params": {**(config.get("params") or {}), **dict(zip(names, point))},
        }
        if "seed" in config:
            cfg["seed"] = config["seed"]
        validate_config(cfg)  # fail fast inside the worker
        table = run_scenario(cfg)
        return _write_table(table, out_dir, f"{stem}_{idx:03d}", args.format)

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        paths = list(pool.map(run_point, enumerate(points)))

    index = ResultTable(
        columns={
            "index": np.arange(len(points), dtype=float),
            **{
                n: np.array([float(pt[i]) for pt in points])
                for i, n in enumerate(names)
            },
        },
        metadata={
            "scenario": config["scenario"],
            "sweep": {n: list(map(float, grid[n])) for n in names},
            "files": [p.name for p in paths],
        },
    )
    index_path = _write_table(index, out_dir, f"{stem}_index", args.format)
    for p in paths:
        print(p)
    print(index_path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomwaveguide",
        description="Subwavelength atomic-array waveguide simulator",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("ATOMWAVEGUIDE_THREADS", "1")),
        help="worker pool size for sweeps (env ATOMWAVEGUIDE_THREADS)",
    )
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)
    p_list = sub.add_parser("list", help="list registered scenarios")
    p_list.set_defaults(func=_cmd_list)
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)
    p_sweep = sub.add_parser("sweep", help="run a cartesian parameter sweep")
    p_sweep.add_argument("config")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def cli(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        return _fail(exc.category, str(exc))
    except (OutOfBandError, CoincidentEmittersError, ValueError) as exc:
        return _fail("physics", str(exc))
    except Exception as exc:  # pragma: no cover - defensive
        return _fail("internal", f"{type(exc).__name__}: {exc}")


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
