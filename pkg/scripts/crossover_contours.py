"""Cross-over time over (m, k0) with the t* = 600, 1200, 1800, 2400 level sets."""

import argparse
import math
from pathlib import Path

import numpy as np

from tempnet_tradeoff import __version__
from tempnet_tradeoff.analysis import CROSSOVER_LEVELS, extract_contours, grid_axis, sweep_crossover
from tempnet_tradeoff.formats import grid_to_json, write_contours_csv, write_grid_csv, write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/crossover")
    ap.add_argument("--m-points", type=int, default=381)
    ap.add_argument("--k0-points", type=int, default=2001)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    grid = sweep_crossover(grid_axis(0, 2000, args.k0_points), grid_axis(1, 20, args.m_points), t0=1.0)
    contours = extract_contours(grid, CROSSOVER_LEVELS)
    write_grid_csv(grid, out / "crossover_grid.csv")
    write_json(grid_to_json(grid, __version__), out / "crossover_grid.json")
    write_contours_csv(contours, out / "crossover_contours.csv")

    for level, segments in contours.items():
        pts = np.concatenate(segments)
        predicted = 2 * pts[:, 0] * (1 + math.sqrt(level))
        worst = np.max(np.abs(pts[:, 1] - predicted) / predicted)
        print(f"t*={level:6.0f}: {len(pts):5d} vertices, k0/m = {2 * (1 + math.sqrt(level)):.2f}, "
              f"max rel. deviation {worst:.2e}")


if __name__ == "__main__":
    main()
