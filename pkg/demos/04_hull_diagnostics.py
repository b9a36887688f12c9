"""Convex-hull coverage of the selected subdata.

For a strongly correlated covariate pair, compares the planar hull of
each selection against the full-data hull.  Good subdata should cover
the data cloud; the exchange pushes the seed's hull outward toward the
full hull while selections like uniform sampling leave the extremes
uncovered.
"""

import numpy as np

from subdopt import exchange, metrics, seeding, simulate

n, k, K = 5_000, 40, 10

x = simulate.gen_mvn_equicorr(n, 2, rho=0.9, rng_seed=3)
xs, _ = seeding.scale_to_unit_cube(x)
_, full_area = metrics.hull_2d(xs)

selections = {
    "uniform": seeding.uniform_seed(xs, k, rng_seed=0),
    "iboss": seeding.iboss_seed(xs, k),
    "oss": seeding.oss_seed(xs, k),
}
seed = selections["oss"]
selections["alg1"], _ = exchange.alg1(xs, seed, K, iterations=5)
selections["valg1"], _ = exchange.valg1(xs, seed, K)

print(f"full-data hull area: {full_area:.4f}")
for name, sel in selections.items():
    verts, area = metrics.hull_2d(xs[sel.indices])
    print(f"{name:<8} hull area {area:.4f}  "
          f"({100 * area / full_area:5.1f}% of full, "
          f"{len(verts)} vertices)")
