"""Repeated-simulation comparison of the selectors.

Runs the full generate/select/fit/score pipeline for a grid of full-data
sizes at fixed subdata size and reports mean slope MSE per method.  The
slope MSE of the exchange-based selections keeps dropping as n grows
even though k stays fixed: a larger pool of extreme points means more
informative subdata.
"""

import numpy as np

from subdopt import simulate

methods = ("uniform", "iboss", "oss", "alg1", "valg1")

for n in (5_000, 10_000, 50_000):
    cfg = simulate.ExperimentConfig(n=n, p=10, k=100, K=25, rho=0.5,
                                    repetitions=30, alg1_iterations=5,
                                    methods=methods, rng_seed=0)
    report = simulate.run_experiment(cfg)
    agg = report.aggregates()
    row = "  ".join(f"{m}={agg[m]['mse_slopes']['mean']:.3f}"
                    for m in methods)
    print(f"n={n:>6}: slope MSE  {row}")
