"""Scenario map over (alpha/m, k0/m) and the per-scenario cell counts."""

import argparse
from pathlib import Path

import numpy as np

from tempnet_tradeoff import ScenarioKind, __version__
from tempnet_tradeoff.analysis import grid_axis, scenario_counts, scenario_map
from tempnet_tradeoff.formats import grid_to_json, write_grid_csv, write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/scenarios")
    ap.add_argument("--resolution", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    x = grid_axis(0.0, 10.0, args.resolution, open_lower=True)
    y = grid_axis(2.0, 100.0, args.resolution, open_lower=True)
    grid = scenario_map(x, y)
    write_grid_csv(grid, out / "scenarios.csv")
    write_json(grid_to_json(grid, __version__), out / "scenarios.json")

    for name, count in scenario_counts(grid).items():
        print(f"{name:18s} {count}")
    safe = grid.values[:, x <= 3].ravel()
    risky = sum(v in (ScenarioKind.TRADEOFF_EARLY_STOP, ScenarioKind.FAILURE) for v in safe)
    print(f"cells with alpha/m <= 3 that stop early or fail: {risky}")
    first_failure = [x[np.flatnonzero(row == ScenarioKind.FAILURE)[0]] for row in grid.values
                     if (row == ScenarioKind.FAILURE).any()]
    if first_failure:
        print(f"failure sets in at alpha/m >= {min(first_failure):.2f}")


if __name__ == "__main__":
    main()
