"""Rewrite the golden CLI outputs under tests/golden from the shipped data.

Run after an intentional change to the corpus, the simulator or the report
format, and review the diff before committing.
"""

import shutil
from pathlib import Path

from eamcr.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"
SCENARIOS = ROOT / "src" / "eamcr" / "data" / "scenarios"

JOBS = {
    "dlei": ["dlei", "--task", "eardrum", "--out", str(GOLDEN / "dlei" / "dlei_eardrum.csv")],
    "simulate": ["simulate", "--scenario", str(SCENARIOS / "skin_lesion_cpu_low_battery.json"), "--out", str(GOLDEN / "simulate")],
    "compare": ["compare", "--scenario", str(SCENARIOS / "skin_lesion_cpu.json"), "--out", str(GOLDEN / "compare")],
}

if __name__ == "__main__":
    for name, argv in JOBS.items():
        shutil.rmtree(GOLDEN / name, ignore_errors=True)
        (GOLDEN / name).mkdir(parents=True)
        assert main(argv) == 0, name
    print(f"golden files written to {GOLDEN}")
