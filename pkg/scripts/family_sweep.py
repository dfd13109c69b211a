"""EAMCR against the mean of fixed policies over the randomized family.

    python scripts/family_sweep.py --n 100 [--csv results/family.csv]
"""

import argparse
import time
from pathlib import Path

from eamcr.experiments import run_family
from eamcr.report import to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--csv", type=Path, default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    outcomes = run_family(range(args.start, args.start + args.n))
    elapsed = time.perf_counter() - t0

    rows = []
    for o in outcomes:
        rows.append([o.seed, o.eamcr_s / 3600, o.fixed_mean_s / 3600, min(o.fixed_s) / 3600, max(o.fixed_s) / 3600, o.beats_mean])
    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        args.csv.write_text(to_csv(["seed", "eamcr_h", "fixed_mean_h", "fixed_min_h", "fixed_max_h", "beats_mean"], rows))

    beats = sum(o.beats_mean for o in outcomes)
    sandwich = sum(o.sandwiched for o in outcomes)
    print(f"EAMCR >= mean(FIXED): {beats}/{len(outcomes)}")
    print(f"sandwich holds:       {sandwich}/{len(outcomes)}")
    print(f"elapsed:              {elapsed:.1f} s")


if __name__ == "__main__":
    main()
