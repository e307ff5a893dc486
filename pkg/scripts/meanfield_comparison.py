"""Simulated ensemble against the mean-field value curve, with one boosted node."""

import argparse
from pathlib import Path

import numpy as np

from tempnet_tradeoff import ModelParams
from tempnet_tradeoff.analysis import compare_sim_to_meanfield, fit_power_law, integrate_meanfield
from tempnet_tradeoff.formats import write_json
from tempnet_tradeoff.simulator import EnsembleSpec, run_simulation, seeded_initial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/meanfield")
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=2021)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    params = ModelParams(n_nodes=100, m=2, k0=1.0, alpha=0.0)
    initial = seeded_initial(params, {0: 10.0})
    spec = EnsembleSpec(runs=args.runs, master_seed=args.seed, steps=args.steps, record_every=args.steps // 20)
    ensemble = run_simulation(spec=spec, params=params, initial_activities=initial)
    report = compare_sim_to_meanfield(ensemble, params)
    write_json(report.to_dict(), out / "report.json")

    print(f"exact accounting: links={report.total_links_exact} activity={report.total_activity_exact}")
    print(f"mean activity gain per step: {report.mean_gain_per_step:g} (2m = {2 * params.m})")
    print(f"node-mean growth rate: {report.node_mean_slope:.4f} (2m/N = {2 * params.m / params.n_nodes:.4f})")
    print(f"boosted node beats the median node in {100 * report.highlighted_beats_median[0]:.1f}% of runs")
    sim = report.highlighted_mean[0][-1]
    micro = report.microscopic_prediction[0][-1]
    print(f"boosted node final activity: simulated {sim:.2f}, microscopic closure {micro:.2f}")

    curve = integrate_meanfield(10.0, 1.0, 1e5, 2, samples=400)
    early = fit_power_law(curve.t, curve.k, (1.0, 2.0))
    late = fit_power_law(curve.t, curve.k, (1e3, 1e5))
    print(f"tracked-node ODE (k0=10, m=2): exponent {early.beta:.3f} early, {late.beta:.3f} late; "
          f"t* = {(10 - 4) ** 2 / 16:g}")
    np.savetxt(out / "meanfield_curve.csv", np.column_stack([curve.t, curve.k]), delimiter=",",
               header="t,k", comments="")


if __name__ == "__main__":
    main()
