"""Command-line entry point: ``tempnet-tradeoff {curves,classify,simulate,sweep,phase}``.

Every invocation writes ``manifest.json`` next to its outputs in ``--out``
(default: ``$TEMPNET_TRADEOFF_OUT`` or ``./tempnet_out``).

Exit status: 0 success, 1 configuration error, 2 capacity error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import (
    CROSSOVER_LEVELS,
    compare_sim_to_meanfield,
    extract_contours,
    grid_axis,
    scenario_counts,
    scenario_map,
    sweep_characteristic,
    sweep_crossover,
)
from .config import PARAM_FIELDS, SPEC_FIELDS, RunConfig, config_from_mapping, parse_config
from .errors import CapacityError, ConfigError, DomainError, InvariantViolation
from .formats import (
    DEFAULT_BINARY_THRESHOLD,
    FORMAT_VERSION,
    format_value,
    grid_to_json,
    write_contours_csv,
    write_grid_csv,
    write_json,
    write_series_binary,
    write_series_csv,
)
from .manifest import RunManifest, load_manifest, write_manifest
from .model import classify_scenario, cost_curve, derive_constants, growth_status, value_curve
from .simulator import DEFAULT_MEMORY_BUDGET, RNG_ALGORITHM, run_simulation, seeded_initial

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CAPACITY = 2
EXIT_INVARIANT = 3
OUT_ENV = "TEMPNET_TRADEOFF_OUT"
SAMPLE_ROWS = 10_000

PHASE_DEFAULTS = {
    "A": dict(x_min=0.0, x_max=2.0, y_min=0.01, y_max=1.0, open_lower=False),
    "B": dict(x_min=0.0, x_max=10.0, y_min=0.1, y_max=100.0, open_lower=False),
    "scenario": dict(x_min=0.0, x_max=10.0, y_min=2.0, y_max=100.0, open_lower=True),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(p, ensemble=False):
    p.add_argument("--config", help="YAML config file; flags override its values")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./tempnet_out)")
    p.add_argument("--n-nodes", "--n_nodes", dest="n_nodes", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--m0", type=int)
    p.add_argument("--k0", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--alpha", type=float)
    if ensemble:
        p.add_argument("--runs", type=int)
        p.add_argument("--master-seed", "--master_seed", dest="master_seed", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--record-every", "--record_every", dest="record_every", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tempnet-tradeoff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curves", help="sample value, cost and net value over time")
    _add_common(p)
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--points", type=int, default=201)

    p = sub.add_parser("classify", help="print the growth scenario with t* and t_char")
    _add_common(p)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("simulate", help="run a stochastic ensemble and write activity series")
    _add_common(p, ensemble=True)
    p.add_argument("--manifest", help="replay the configuration recorded in a manifest")
    p.add_argument("--boost", action="append", default=None, metavar="NODE=ACTIVITY",
                   help="initial activity override for one node (repeatable)")
    p.add_argument("--binary-threshold", type=int, default=None,
                   help=f"rows per run above which a binary dump is written (default {DEFAULT_BINARY_THRESHOLD})")
    p.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET, help="bytes")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep", help="cross-over time grid over (m, k0) and its contours")
    p.add_argument("--out")
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--m-min", type=float, default=1.0)
    p.add_argument("--m-max", type=float, default=20.0)
    p.add_argument("--m-points", type=int, default=381)
    p.add_argument("--k0-min", type=float, default=0.0)
    p.add_argument("--k0-max", type=float, default=2000.0)
    p.add_argument("--k0-points", type=int, default=1001)
    p.add_argument("--levels", default=",".join(f"{v:g}" for v in CROSSOVER_LEVELS))

    p = sub.add_parser("phase", help="ln(t_char) grids (A, B) or the scenario map")
    p.add_argument("--out")
    p.add_argument("--kind", choices=sorted(PHASE_DEFAULTS), default="B")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--y-min", type=float)
    p.add_argument("--y-max", type=float)
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--open-lower", action="store_true", default=None,
                   help="exclude the lower end of both axes")
    p.add_argument("--scale", type=float, default=1.0, help="absolute k0 (A) or m (B, scenario)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--t0", type=float, default=1.0)
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or "tempnet_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _overrides(args) -> dict:
    keys = list(PARAM_FIELDS) + list(SPEC_FIELDS)
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _parse_boosts(items) -> dict:
    boosted = {}
    for item in items or []:
        node, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"expected NODE=ACTIVITY, got {item!r}", field="boosted")
        try:
            boosted[int(node)] = float(value)
        except ValueError as exc:
            raise ConfigError(f"expected NODE=ACTIVITY, got {item!r}", field="boosted") from exc
    return boosted


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc


def _load_run_config(args, analytic: bool) -> RunConfig:
    overrides = _overrides(args)
    text = _read_text(args.config) if getattr(args, "config", None) else ""
    defaults = {}
    if analytic:
        # n_nodes is irrelevant to the closed forms; default it so that m <= n_nodes holds.
        data = yaml.safe_load(text) if text else {}
        m = overrides.get("m", (data or {}).get("m") if isinstance(data, dict) else None)
        defaults["n_nodes"] = m if isinstance(m, int) and m >= 2 else 2
    return parse_config(text, overrides=overrides, defaults=defaults)


def _manifest(args, argv, config=None, options=None) -> RunManifest:
    effective = config.to_dict() if config is not None else {}
    return RunManifest(
        command={"subcommand": args.command, "argv": list(argv), "options": options or {}},
        effective_config=effective,
        tool_version=__version__,
        rng_algorithm=RNG_ALGORITHM,
        params=config.params.to_dict() if config is not None else None,
        spec=None,
        master_seed=None,
    )


def _finish(manifest: RunManifest, out: Path, paths) -> Path:
    for path in paths:
        manifest.add_output(path, out)
    return write_manifest(manifest, out)


def cmd_curves(args, argv) -> int:
    config = _load_run_config(args, analytic=True)
    params = config.params
    if not 0 <= args.t_start < args.t_end or args.points < 2:
        raise ConfigError("need 0 <= t_start < t_end and points >= 2", field="t_start")
    out = _out_dir(args)
    path = out / "curves.csv"
    c = params.c
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {FORMAT_VERSION}\n")
        fh.write("t,value,cost,net,status\n")
        for t in np.linspace(args.t_start, args.t_end, args.points):
            t = float(t)
            kv = value_curve(t, params.m, c)
            kc = cost_curve(t, params.m, params.alpha)
            status = growth_status(t, params).value
            fh.write(",".join(format_value(v) for v in (t, kv, kc, kv - kc)) + f",{status}\n")
    d = derive_constants(params)
    print(f"c={d.c:.12g} t*={'n/a' if d.t_star is None else format(d.t_star, '.12g')} "
          f"t_char={'inf' if d.t_char is None else format(d.t_char, '.12g')}")
    opts = {"t_start": args.t_start, "t_end": args.t_end, "points": args.points}
    _finish(_manifest(args, argv, config, opts), out, [path])
    return EXIT_OK


def cmd_classify(args, argv) -> int:
    config = _load_run_config(args, analytic=True)
    scenario = classify_scenario(config.params, args.tol)
    d = derive_constants(config.params)
    print(scenario.describe())
    out = _out_dir(args)
    doc = {
        "format": FORMAT_VERSION,
        "scenario": scenario.variant.value,
        "c": d.c,
        "t_star": d.t_star,
        "t_char": d.t_char,
        "tol": args.tol,
        "params": config.params.to_dict(),
    }
    path = write_json(doc, out / "classify.json")
    _finish(_manifest(args, argv, config, {"tol": args.tol}), out, [path])
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    overrides = _overrides(args)
    boosts = _parse_boosts(args.boost)
    options = {}
    if args.manifest:
        recorded = load_manifest(args.manifest)
        if recorded.get("command", {}).get("subcommand") != "simulate":
            raise ConfigError("manifest was not produced by 'simulate'", field="manifest")
        data = dict(recorded["effective_config"])
        options = dict(recorded["command"].get("options", {}))
        if boosts:
            data["boosted"] = boosts
        config = config_from_mapping(data, overrides=overrides)
    else:
        config = _load_run_config(args, analytic=False)
        if boosts:
            config = config_from_mapping({**config.to_dict(), "boosted": boosts})
    threshold = args.binary_threshold if args.binary_threshold is not None else options.get(
        "binary_threshold", DEFAULT_BINARY_THRESHOLD)
    options = {"binary_threshold": threshold}

    params, spec = config.params, config.spec
    initial = seeded_initial(params, config.boosted)
    ensemble = run_simulation(params, spec, initial_activities=initial,
                              memory_budget=args.memory_budget, workers=args.workers)
    out = _out_dir(args)
    paths = []
    for series in ensemble:
        stem = f"series_run{series.run_index:03d}"
        rows = series.n_nodes * len(series.times)
        if rows > threshold:
            paths.append(write_series_binary(series, out / f"{stem}.bin"))
            paths.append(write_series_csv(series, out / f"{stem}_sample.csv", limit=SAMPLE_ROWS))
        else:
            paths.append(write_series_csv(series, out / f"{stem}.csv"))
    report = compare_sim_to_meanfield(ensemble, params)
    if not report.total_links_exact:
        raise InvariantViolation("recorded link counts differ from m0 + m*step")
    report_doc = {"format": FORMAT_VERSION, **report.to_dict(),
                  "seeds": [int(s.seed) for s in ensemble]}
    paths.append(write_json(report_doc, out / "report.json"))
    manifest = _manifest(args, argv, config, options)
    manifest.spec = {"runs": spec.runs, "master_seed": int(spec.master_seed), "steps": spec.steps,
                     "record_every": spec.record_every}
    manifest.master_seed = int(spec.master_seed)
    _finish(manifest, out, paths)
    print(f"wrote {spec.runs} run(s) to {out}; mean activity gain per step {report.mean_gain_per_step:g}")
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    try:
        levels = [float(v) for v in args.levels.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --levels {args.levels!r}", field="levels") from exc
    m_axis = grid_axis(args.m_min, args.m_max, args.m_points)
    k0_axis = grid_axis(args.k0_min, args.k0_max, args.k0_points)
    grid = sweep_crossover(k0_axis, m_axis, args.t0)
    contours = extract_contours(grid, levels)
    out = _out_dir(args)
    paths = [
        write_grid_csv(grid, out / "crossover_grid.csv"),
        write_json(grid_to_json(grid, __version__), out / "crossover_grid.json"),
        write_contours_csv(contours, out / "crossover_contours.csv"),
    ]
    opts = {k: getattr(args, k) for k in ("t0", "m_min", "m_max", "m_points", "k0_min", "k0_max", "k0_points")}
    opts["levels"] = levels
    _finish(_manifest(args, argv, None, opts), out, paths)
    n_vertices = sum(len(seg) for segs in contours.values() for seg in segs)
    print(f"t* grid {len(k0_axis)}x{len(m_axis)}, {n_vertices} contour vertices at levels {levels}")
    return EXIT_OK


def cmd_phase(args, argv) -> int:
    d = dict(PHASE_DEFAULTS[args.kind])
    for key in ("x_min", "x_max", "y_min", "y_max", "open_lower"):
        if getattr(args, key) is not None:
            d[key] = getattr(args, key)
    x = grid_axis(d["x_min"], d["x_max"], args.resolution, d["open_lower"])
    y = grid_axis(d["y_min"], d["y_max"], args.resolution, d["open_lower"])
    if args.kind == "scenario":
        if args.scale != int(args.scale) or args.scale < 1:
            raise ConfigError("scenario map needs an integer --scale >= 1 (it is m)", field="scale")
        grid = scenario_map(x, y, tol=args.tol, m=int(args.scale), t0=args.t0)
        summary = scenario_counts(grid)
    else:
        grid = sweep_characteristic(args.kind, x, y, scale=args.scale, t0=args.t0)
        summary = {"finite_cells": int(np.isfinite(grid.values).sum()), "cells": int(grid.values.size)}
    out = _out_dir(args)
    stem = f"phase_{args.kind}"
    paths = [
        write_grid_csv(grid, out / f"{stem}.csv"),
        write_json(grid_to_json(grid, __version__), out / f"{stem}.json"),
    ]
    opts = {"kind": args.kind, "resolution": args.resolution, "scale": args.scale, "tol": args.tol,
            "t0": args.t0, **d}
    _finish(_manifest(args, argv, None, opts), out, paths)
    print(" ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


COMMANDS = {
    "curves": cmd_curves,
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "phase": cmd_phase,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, argv)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except Exception:
        traceback.print_exc()
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
