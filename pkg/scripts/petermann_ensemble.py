"""Petermann-factor statistics of the lasing mode across an ensemble.

Runs the laser pipeline for a config file and prints quantiles of K together
with a text histogram of log10(K - 1).
"""
import argparse

import numpy as np

from openres.harness import load_config, run_ensemble


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="configs/laser.json")
    parser.add_argument("--realizations", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", default="out/petermann")
    parser.add_argument("--bins", type=int, default=12)
    args = parser.parse_args()

    cfg = load_config(args.config, out=args.out, realizations=args.realizations).validate()
    summary, _ = run_ensemble(cfg, workers=args.workers)
    k = np.array([r["K"] for r in summary.ok_records], dtype=float)
    print(f"{k.size} lasing realizations, errors: {summary.errors or 'none'}")
    if k.size == 0:
        return
    for q in (0.05, 0.25, 0.5, 0.75, 0.95):
        print(f"  K quantile {q:4.2f}: {np.quantile(k, q):.6f}")
    excess = np.log10(np.clip(k - 1, 1e-16, None))
    counts, edges = np.histogram(excess, bins=args.bins)
    width = max(counts.max(), 1)
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        print(f"  [{lo:6.2f}, {hi:6.2f}) {'#' * int(40 * c / width)} {c}")


if __name__ == "__main__":
    main()
