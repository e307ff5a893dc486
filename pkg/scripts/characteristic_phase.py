"""ln(characteristic time) in (alpha/k0, m/k0) and (alpha/m, k0/m) coordinates."""

import argparse
from pathlib import Path

import numpy as np

from tempnet_tradeoff import __version__
from tempnet_tradeoff.analysis import grid_axis, sweep_characteristic
from tempnet_tradeoff.formats import grid_to_json, write_grid_csv, write_json

RANGES = {
    "A": ((0.0, 2.0), (0.01, 1.0)),
    "B": ((0.0, 10.0), (0.1, 100.0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/characteristic")
    ap.add_argument("--resolution", type=int, default=201)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for coords, (xr, yr) in RANGES.items():
        grid = sweep_characteristic(coords, grid_axis(*xr, args.resolution), grid_axis(*yr, args.resolution))
        write_grid_csv(grid, out / f"ln_t_char_{coords}.csv")
        write_json(grid_to_json(grid, __version__), out / f"ln_t_char_{coords}.json")
        finite = grid.values[np.isfinite(grid.values)]
        print(f"{coords} ({grid.x_label} vs {grid.y_label}): {finite.size}/{grid.values.size} cells "
              f"with an intersection, ln t_char in [{finite.min():.2f}, {finite.max():.2f}]")


if __name__ == "__main__":
    main()
