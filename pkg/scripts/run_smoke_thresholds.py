#!/usr/bin/env python3
"""Reduced threshold sweep: one repeat, three counts per variant.

Mirrors the grid the acceptance suite runs; useful for a quick look at where
each variant's recovery threshold sits on this machine.  Writes one CSV (plus
summary) per variant under --outdir.
"""

import argparse
from pathlib import Path

from kyberlab import experiment
from kyberlab.params import Variant

SMOKE_GRID = {
    Variant.K512: [6000, 7000, 8000],
    Variant.K768: [7000, 8000, 9000],
    Variant.K1024: [10000, 11000, 12000],
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results/smoke")
    parser.add_argument("--seed", type=int, default=790)
    parser.add_argument("--repeats", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    thresholds = {}
    for variant, counts in SMOKE_GRID.items():
        out = outdir / f"smoke_{variant.value}.csv"
        records = experiment.run_sweep(experiment.SweepConfig(
            variant, counts, repeats=args.repeats, master_seed=args.seed,
            workers=args.workers, out_path=str(out)))
        thresholds[variant] = experiment.minimum_reliable_count(records, 0.8)
        for row in experiment.summarize(records):
            print(f"{variant.value} @{row['ineq_count']}: "
                  f"{row['successes']}/{row['trials']} mean {row['mean_wall_ms'] / 1000:.0f}s")
    print("thresholds (>=80% success):",
          {v.value: t for v, t in thresholds.items()})


if __name__ == "__main__":
    main()
