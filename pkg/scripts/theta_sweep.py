"""Sweep the disguise threshold on a synthetic population and summarize the response.

Prints, for a handful of thresholds, the share of users able to disguise, the
average daily saving among them and the system peak relative to no disguising.
With --plot, also writes a four-panel figure (needs matplotlib).

    python scripts/theta_sweep.py --n 3155 --k 30 --plot sweep.png
"""

import argparse
import time

import numpy as np

from pricevuln import compute_all, fit, price_clusters, synthesize
from pricevuln.clustering import ClusterConfig
from pricevuln.economics import benefit_curves
from pricevuln.pricing import synthetic_curve
from pricevuln.profiles import demo_mixture
from pricevuln.sysload import peak_sweep
from pricevuln.zones import AGGREGATE, ThetaGrid, sweep

REPORT_AT = (0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.45, 0.5)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3155)
    ap.add_argument("--k", type=int, default=30)
    ap.add_argument("--prototypes", type=int, default=10)
    ap.add_argument("--sigma", type=float, default=0.15)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--extent", choices=["cr", "full"], default="cr")
    ap.add_argument("--plot", help="write a figure to this path")
    args = ap.parse_args()

    t0 = time.perf_counter()
    data = synthesize(demo_mixture(args.n, args.prototypes, sigma=args.sigma, seed=args.seed))
    model = fit(data, args.k, ClusterConfig(seed=args.seed))
    prices = price_clusters(model, synthetic_curve())
    records = compute_all(data, model, prices, threads=4)
    grid = ThetaGrid()
    zones = sweep(records, data, model, grid)
    curve = benefit_curves(records, data.profiles, prices, grid)
    load = peak_sweep(data, records, grid, args.extent, model.centers)
    print(f"{len(data)} profiles, k={model.k}, {time.perf_counter() - t0:.1f} s")

    crs = np.array([r.cr for r in records])
    finite = crs[np.isfinite(crs)]
    print(f"can disguise at some effort: {finite.size}/{crs.size}; "
          f"smallest CR {finite.min():.4f}, median {np.median(finite):.3f}")
    print(f"{'theta':>6} {'strategic %':>12} {'avg benefit':>12} {'peak ratio':>11}")
    agg = {r.theta: r for r in zones if r.cluster == AGGREGATE}
    by_theta = {r.theta: r for r in curve}
    peaks = {r.theta: r for r in load}
    for th in REPORT_AT:
        print(f"{th:6.3f} {100 * agg[th].pct_sensitive:12.2f} {by_theta[th].avg_cumulative:12.4f} "
              f"{peaks[th].peak_ratio:11.4f}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        th = grid.points()
        fig, ax = plt.subplots(2, 2, figsize=(10, 7))
        for n in range(model.k):
            mine = [r for r in zones if r.cluster == n]
            ax[0, 0].plot(th, [100 * r.pct_sensitive for r in mine], lw=0.8)
            ax[0, 1].plot(th, [r.radius for r in mine], lw=0.8)
        ax[0, 0].set(xlabel="theta", ylabel="strategic users in cluster (%)")
        ax[0, 1].set(xlabel="theta", ylabel="stable radius (l1)")
        ax[1, 0].plot(th, [r.avg_cumulative for r in curve], label="cumulative")
        ax[1, 0].plot(th, [r.avg_marginal for r in curve], label="newly enabled")
        ax[1, 0].set(xlabel="theta", ylabel="average saving per user-day")
        ax[1, 0].legend()
        for row in load[:: max(1, len(load) // 5)]:
            ax[1, 1].plot(row.hourly_load, label=f"theta={row.theta:g}")
        ax[1, 1].set(xlabel="hour", ylabel="system load (kWh)")
        ax[1, 1].legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        print(f"figure written to {args.plot}")


if __name__ == "__main__":
    main()
