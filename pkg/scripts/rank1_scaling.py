#!/usr/bin/env python3
"""Rank-1 error scaling against the number of disjoint paths.

On the extreme-sparsity pattern the target entry (1, 1) is reachable by
exactly n-1 edge-disjoint length-3 paths.  This sweep estimates the RMSE of
the multi-path ratio estimator at several sizes and fits the log-log slope
of RMSE against the path count, which should sit near -1/2.
"""

import argparse
import math

import numpy as np

from flowcomplete import SimConfig, run_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[9, 17, 33, 65])
    parser.add_argument("--sigma", type=float, default=0.05)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=20240810)
    args = parser.parse_args()

    ks, rmses = [], []
    print(f"{'n':>5} {'K':>5} {'RMSE':>12}")
    for n in args.sizes:
        config = SimConfig(pattern="extreme_sparsity", model="rank1",
                           n_rows=n, n_cols=n, noise_sigma=args.sigma,
                           trials=args.trials, seed=args.seed + n,
                           target_row=0, target_col=0)
        result = run_experiment(config)
        rmse = math.sqrt(result.per_entry_mse[0, 0])
        ks.append(n - 1)
        rmses.append(rmse)
        print(f"{n:>5} {n - 1:>5} {rmse:>12.6f}")
    slope = float(np.polyfit(np.log(ks), np.log(rmses), 1)[0])
    print(f"\nlog-log slope of RMSE vs K: {slope:.3f} (theory: -0.5)")


if __name__ == "__main__":
    main()
