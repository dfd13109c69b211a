"""Randomized scenario family for the EAMCR-versus-average comparison.

Each scenario holds five synthetic models on one accelerator with a strict
accuracy/energy trade-off: sorting by energy also sorts by accuracy, so no
model dominates another. The battery is scaled down to 40 mAh so a run
finishes in a fraction of a second, with the threshold kept at the same
fraction of capacity as the shipped 4000/1500 mAh scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import BatteryState, effective_load
from .engine import EngineConfig
from .profiles import AcceleratorKind, ModelProfile, ProfileSet, RuntimeProfile
from .sim import ArrivalKind, ComparisonReport, EamcrPolicy, FixedPolicy, Workload, compare_policies

TASK = "synthetic"
ACCEL = AcceleratorKind.GPU


@dataclass(frozen=True)
class FamilyConfig:
    n_models: int = 5
    latency_range_ms: tuple = (20.0, 700.0)  # sampled log-uniformly
    power_range_mw: tuple = (2000.0, 2600.0)
    accuracy_range: tuple = (0.60, 0.95)
    voltage_v: float = 3.85
    idle_ma: float = 50.0
    capacity_mah: float = 40.0
    threshold_fraction: float = 0.375  # 1500 / 4000
    duty_range: tuple = (0.2, 0.9)  # duty of the slowest model
    planned_range: tuple = (0.5, 1.2)  # times the best post-threshold usage time
    horizon_s: float = 20 * 3600.0
    noise_amplitude: float = 0.05
    alpha: float = 0.2


@dataclass(frozen=True)
class FamilyScenario:
    seed: int
    profiles: ProfileSet
    engine: EngineConfig
    battery: BatteryState
    workload: Workload


@dataclass(frozen=True)
class FamilyOutcome:
    seed: int
    eamcr_s: float
    fixed_s: tuple

    @property
    def fixed_mean_s(self) -> float:
        return sum(self.fixed_s) / len(self.fixed_s)

    @property
    def beats_mean(self) -> bool:
        return self.eamcr_s >= self.fixed_mean_s

    @property
    def sandwiched(self) -> bool:
        return min(self.fixed_s) <= self.eamcr_s <= max(self.fixed_s)


def make_scenario(seed: int, cfg: FamilyConfig = FamilyConfig()) -> FamilyScenario:
    rng = np.random.default_rng([seed, 11])
    n = cfg.n_models
    lo, hi = cfg.latency_range_ms
    latency = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    power = rng.uniform(*cfg.power_range_mw, n)
    accuracy = np.sort(rng.uniform(*cfg.accuracy_range, n))
    by_energy = np.argsort(latency * power)

    models = []
    for rank, i in enumerate(by_energy):
        rt = RuntimeProfile(ACCEL, float(latency[i]), float(power[i]), float(power[i] / cfg.voltage_v))
        models.append(ModelProfile(f"M{rank}", TASK, float(accuracy[rank]), 10.0, {ACCEL: rt}))
    profiles = ProfileSet("synthetic-family", cfg.voltage_v, cfg.idle_ma, tuple(models))

    rate = rng.uniform(*cfg.duty_range) / (latency.max() / 1000.0)
    lightest = min(effective_load(m.runtimes[ACCEL], cfg.idle_ma, rate).effective_discharge_ma for m in models)
    threshold = cfg.threshold_fraction * cfg.capacity_mah
    planned = rng.uniform(*cfg.planned_range) * threshold / lightest
    engine = EngineConfig(threshold, (0.0, 1.0), float(planned), cfg.alpha, ACCEL)
    battery = BatteryState(cfg.capacity_mah, cfg.capacity_mah, cfg.voltage_v)
    workload = Workload(ArrivalKind.FIXED_RATE, float(rate), cfg.horizon_s, seed)
    return FamilyScenario(seed, profiles, engine, battery, workload)


def run_scenario(sc: FamilyScenario, cfg: FamilyConfig = FamilyConfig()) -> ComparisonReport:
    policies = [EamcrPolicy(sc.engine)] + [FixedPolicy(m.name) for m in sc.profiles.models]
    return compare_policies(
        sc.profiles,
        TASK,
        ACCEL,
        sc.battery,
        policies,
        sc.workload,
        scenario_id=f"family-{sc.seed}",
        noise_amplitude=cfg.noise_amplitude,
    )


def run_family(seeds, cfg: FamilyConfig = FamilyConfig()) -> list:
    out = []
    for seed in seeds:
        rep = run_scenario(make_scenario(seed, cfg), cfg)
        times = [r.operating_time_s for r in rep.results]
        out.append(FamilyOutcome(seed, times[0], tuple(times[1:])))
    return out
