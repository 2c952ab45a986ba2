"""Cluster a hand-built three-cluster population and show who can disguise cheaply.

Boundary profiles are planted a known distance inside their home cluster, so
their minimal effort is fixed in closed form; this prints computed against
planted efforts and the trajectory table at a small threshold.

    python scripts/planted_boundary.py --theta 0.01
"""

import argparse

import numpy as np

from pricevuln import compute_all, fit, price_clusters, trajectories
from pricevuln.clustering import ClusterConfig
from pricevuln.scenarios import planted_population


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--members", type=int, default=40, help="profiles per cluster around each prototype")
    ap.add_argument("--theta", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    pop = planted_population(args.members, seed=args.seed)
    model = fit(pop.data, 3, ClusterConfig(seed=args.seed))
    prices = price_clusters(model, pop.curve)
    records = compute_all(pop.data, model, prices)

    print("cluster prices:", ", ".join(f"{n}: {p:.5f}" for n, p in enumerate(prices.price)))
    crs = np.array([r.cr for r in records])
    center = ~pop.boundary
    print(f"planted centers: {center.sum()} profiles, smallest CR {crs[center].min():.4f}")
    print(f"{'profile':>16} {'home':>4} {'target':>6} {'CR':>9} {'planted':>9}")
    for i in np.flatnonzero(pop.boundary):
        r = records[i]
        print(f"{r.profile_id:>16} {r.home_cluster:>4} {r.target:>6} {r.cr:9.6f} {pop.expected_cr[i]:9.6f}")
    table = trajectories(records, args.theta)
    print(f"trajectories at theta = {args.theta:g}:")
    for (a, b), count in table.items():
        print(f"  {a} -> {b}: {count}")


if __name__ == "__main__":
    main()
