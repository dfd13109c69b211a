"""Remaining-charge curves for the shipped skin-lesion scenarios.

Runs every policy of each scenario, writes comparison.json, summary.csv and
an SVG chart per scenario, then prints per-model GPU vs CPU differences.

    python scripts/energy_curves.py --out results/curves
"""

import argparse
import json
from pathlib import Path

from eamcr.cli import main as cli_main
from eamcr.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "eamcr" / "data" / "scenarios"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/curves"))
    args = ap.parse_args()

    for name in ("skin_lesion_cpu", "skin_lesion_gpu"):
        print(f"== {name}")
        cli_main(["compare", "--scenario", str(SCENARIOS / f"{name}.json"), "--out", str(args.out / name), "--format", "svg"])

    hours = {}
    for name in ("skin_lesion_cpu", "skin_lesion_gpu"):
        doc = json.loads((args.out / name / "comparison.json").read_text())
        hours[name] = {k: v["operating_time_s"] / 3600 for k, v in doc["summary"].items()}
    print("\nper-policy GPU - CPU operating time (minutes)")
    for label, cpu in hours["skin_lesion_cpu"].items():
        gpu = hours["skin_lesion_gpu"].get(label)
        if gpu is not None:
            print(f"  {label:28s} {60 * (gpu - cpu):+7.1f}")
    print(f"\nscenario: {load_scenario(SCENARIOS / 'skin_lesion_cpu.json').scenario_id}")


if __name__ == "__main__":
    main()
