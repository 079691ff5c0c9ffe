#!/usr/bin/env python3
"""Full threshold and timing sweep (hours-scale on a desktop core).

Covers the complete search ranges with repeated trials per point:
  512:  5000-8000    768:  6000-10000    1024: 8000-13000
step 1000.  Produces one CSV + summary per variant, prints the >=80%
thresholds and the median successful wall time at each variant's best
operating point, and checks both orderings.
"""

import argparse
import statistics
from pathlib import Path

from kyberlab import experiment
from kyberlab.params import Variant

FULL_GRID = {
    Variant.K512: list(range(5000, 8001, 1000)),
    Variant.K768: list(range(6000, 10001, 1000)),
    Variant.K1024: list(range(8000, 13001, 1000)),
}
BEST_POINTS = {Variant.K512: 7000, Variant.K768: 8000, Variant.K1024: 11000}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results/full")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    thresholds = {}
    medians = {}
    for variant, counts in FULL_GRID.items():
        out = outdir / f"full_{variant.value}.csv"
        records = experiment.run_sweep(experiment.SweepConfig(
            variant, counts, repeats=args.repeats, master_seed=args.seed,
            workers=args.workers, out_path=str(out)))
        thresholds[variant] = experiment.minimum_reliable_count(records, 0.8)
        best = [r.wall_ms for r in records
                if r.ineq_count == BEST_POINTS[variant] and r.success]
        medians[variant] = statistics.median(best) if best else float("nan")
        for row in experiment.summarize(records):
            print(f"{variant.value} @{row['ineq_count']}: "
                  f"{row['successes']}/{row['trials']} mean {row['mean_wall_ms'] / 1000:.0f}s")

    print("\nthresholds (>=80% success):", {v.value: t for v, t in thresholds.items()})
    print("median successful wall ms at best points:",
          {v.value: round(m) for v, m in medians.items()})
    t = thresholds
    print("threshold ordering 512 < 768 < 1024:",
          t[Variant.K512] < t[Variant.K768] < t[Variant.K1024])
    print("time ordering 512 < 768 < 1024:",
          medians[Variant.K512] < medians[Variant.K768] < medians[Variant.K1024])


if __name__ == "__main__":
    main()
