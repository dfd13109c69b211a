from pathlib import Path

import pytest

from eamcr.cli import default_profiles_path
from eamcr.profiles import AcceleratorKind, ModelProfile, ProfileSet, RuntimeProfile, load_profiles

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "eamcr" / "data"
SCENARIOS = DATA / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"

CPU = AcceleratorKind.CPU_SINGLE
MT = AcceleratorKind.CPU_MULTI
GPU = AcceleratorKind.GPU


def runtime(kind, latency_ms, power_mw, voltage=3.85):
    return RuntimeProfile(kind, latency_ms, power_mw, power_mw / voltage)


def model(name, accuracy, task="t", **runtimes):
    """``model("A", 0.9, CPU_SINGLE=(500, 2000))``"""
    rts = {AcceleratorKind[k]: runtime(AcceleratorKind[k], *v) for k, v in runtimes.items()}
    return ModelProfile(name, task, accuracy, 10.0, rts)


def profile_set(*models, idle_ma=0.0, voltage=3.85):
    return ProfileSet("test-device", voltage, idle_ma, tuple(models))


@pytest.fixture(scope="session")
def corpus():
    return load_profiles(default_profiles_path())


def corpus_doc():
    import json

    return json.loads(default_profiles_path().read_text())
