"""Runtime decision engine that trades accuracy for battery life.

The engine starts in open-access mode, where the user (or, by default,
the most accurate model) decides what runs. Once the remaining charge
falls to the configured threshold it latches into energy-efficient mode
and from then on picks the most accurate model whose estimated usage time
still covers the user's planned hours. When no model can cover them it
falls back to the model with the best accuracy-per-energy index.

After every inference the observed latency and energy are folded into
per-model exponential moving averages, and selection uses those averages
rather than the static profile numbers.

An engine instance has a single owner; concurrent mutation is not
supported. Separate instances share nothing mutable.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

from .energy import BatteryState, EffectiveLoad, InferenceOutcome, dlei, effective_load, energy_per_inference
from .errors import NoCandidates, UnknownModel, ValidationError
from .profiles import AcceleratorKind, ProfileSet, RuntimeProfile, candidates

log = logging.getLogger(__name__)


class EngineMode(str, enum.Enum):
    OPEN_ACCESS = "OPEN_ACCESS"
    ENERGY_EFFICIENT = "ENERGY_EFFICIENT"


class Rationale(str, enum.Enum):
    USER_CHOICE = "USER_CHOICE"
    ACCURACY_MAX_FEASIBLE = "ACCURACY_MAX_FEASIBLE"
    DLEI_FALLBACK = "DLEI_FALLBACK"


@dataclass(frozen=True)
class EngineConfig:
    threshold_mah: float
    accuracy_region: tuple = (0.0, 1.0)
    planned_hours: float = 1.0
    feedback_alpha: float = 0.2
    accelerator: AcceleratorKind = AcceleratorKind.CPU_SINGLE
    user_model_choice: Optional[str] = None
    # Sensitivity switch: judge models by their active current alone,
    # ignoring idle time between requests.
    active_only_discharge: bool = False

    def check(self, design_capacity_mah: float) -> None:
        lo, hi = self.accuracy_region
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValidationError("accuracy_region", list(self.accuracy_region), "need 0 <= lo <= hi <= 1")
        if not 0 < self.threshold_mah <= design_capacity_mah:
            raise ValidationError(
                "threshold_mah", self.threshold_mah, f"must lie in (0, {design_capacity_mah}]"
            )
        if not self.planned_hours > 0:
            raise ValidationError("planned_hours", self.planned_hours, "must be > 0")
        if not 0 < self.feedback_alpha <= 1:
            raise ValidationError("feedback_alpha", self.feedback_alpha, "must lie in (0, 1]")


@dataclass
class ModelStats:
    model_name: str
    accelerator: AcceleratorKind
    ema_latency_ms: float
    ema_energy_mj: float
    ema_discharge_ma: float
    observation_count: int = 0

    @classmethod
    def from_runtime(cls, name: str, rt: RuntimeProfile) -> "ModelStats":
        return cls(name, rt.accelerator, rt.latency_ms, energy_per_inference(rt), rt.discharge_ma)

    # Runtime-profile view of the averages, enough for ``effective_load``.
    @property
    def latency_ms(self) -> float:
        return self.ema_latency_ms

    @property
    def discharge_ma(self) -> float:
        return self.ema_discharge_ma


@dataclass(frozen=True)
class Decision:
    model_name: str
    accelerator: AcceleratorKind
    mode: EngineMode
    rationale: Rationale
    estimated_usage_h: float
    timestamp_s: float = 0.0

    def same_choice(self, other: Optional["Decision"]) -> bool:
        return (
            other is not None
            and self.model_name == other.model_name
            and self.mode is other.mode
            and self.rationale is other.rationale
        )


def ema(prior: float, observed: float, alpha: float) -> float:
    return (1.0 - alpha) * prior + alpha * observed


class DecisionEngine:
    def __init__(self, profiles: ProfileSet, task: str, config: EngineConfig, design_capacity_mah: float):
        config.check(design_capacity_mah)
        pool = candidates(profiles, task, config.accelerator)
        if not pool:
            raise NoCandidates(f"no model for task {task!r} runs on {config.accelerator.value}")
        self.profiles = profiles
        self.task = task
        self.config = config
        self.pool = pool
        self.mode = EngineMode.OPEN_ACCESS
        self.stats = {
            m.name: ModelStats.from_runtime(m.name, m.runtimes[config.accelerator]) for m in pool
        }
        self._by_name = {m.name: m for m in pool}
        lo, hi = config.accuracy_region
        self._region_pool = [m for m in pool if lo <= m.accuracy <= hi]
        self._warned_relax = False

    # -- mode management --

    def observe_battery(self, battery: BatteryState) -> EngineMode:
        if self.mode is EngineMode.OPEN_ACCESS and battery.remaining_mah <= self.config.threshold_mah:
            self.mode = EngineMode.ENERGY_EFFICIENT
            log.info("switching to energy-efficient mode at %.3f mAh", battery.remaining_mah)
        return self.mode

    def reset_on_recharge(self, battery: BatteryState) -> EngineMode:
        if battery.remaining_mah > self.config.threshold_mah:
            self.mode = EngineMode.OPEN_ACCESS
        return self.mode

    # -- selection --

    def load_for(self, name: str, request_rate_per_s: float) -> EffectiveLoad:
        st = self.stats[name]
        if self.config.active_only_discharge:
            return EffectiveLoad(request_rate_per_s, 1.0, st.ema_discharge_ma)
        return effective_load(st, self.profiles.idle_ma, request_rate_per_s)

    def usage_hours(self, name: str, battery: BatteryState, request_rate_per_s: float) -> float:
        current = self.load_for(name, request_rate_per_s).effective_discharge_ma
        if current <= 0:
            return math.inf
        return battery.remaining_mah / current

    def select_model(self, battery: BatteryState, request_rate_per_s: float) -> Decision:
        if self.mode is EngineMode.OPEN_ACCESS:
            choice = self.config.user_model_choice
            if choice is not None and choice in self._by_name:
                name, why = choice, Rationale.USER_CHOICE
            else:
                name, why = self.pool[0].name, Rationale.ACCURACY_MAX_FEASIBLE
            usage = self.usage_hours(name, battery, request_rate_per_s)
            return Decision(name, self.config.accelerator, self.mode, why, usage)

        pool = self._region_pool
        if not pool:
            if not self._warned_relax:
                log.warning(
                    "no %s model inside accuracy region %s; considering all models",
                    self.task,
                    list(self.config.accuracy_region),
                )
                self._warned_relax = True
            pool = self.pool

        for m in pool:  # already ordered by descending accuracy
            usage = self.usage_hours(m.name, battery, request_rate_per_s)
            if usage >= self.config.planned_hours:
                return Decision(m.name, self.config.accelerator, self.mode, Rationale.ACCURACY_MAX_FEASIBLE, usage)
        best = min(
            pool,
            key=lambda m: (-dlei(m.accuracy, self.stats[m.name].ema_energy_mj), -m.accuracy, m.name),
        )
        usage = self.usage_hours(best.name, battery, request_rate_per_s)
        return Decision(best.name, self.config.accelerator, self.mode, Rationale.DLEI_FALLBACK, usage)

    # -- feedback --

    def record_feedback(self, outcome: InferenceOutcome) -> ModelStats:
        st = self.stats.get(outcome.model_name)
        if st is None or outcome.accelerator is not st.accelerator:
            raise UnknownModel(f"{outcome.model_name}@{outcome.accelerator}")
        a = self.config.feedback_alpha
        power_mw = outcome.energy_mj * 1000.0 / outcome.latency_ms
        st.ema_latency_ms = ema(st.ema_latency_ms, outcome.latency_ms, a)
        st.ema_energy_mj = ema(st.ema_energy_mj, outcome.energy_mj, a)
        st.ema_discharge_ma = ema(st.ema_discharge_ma, power_mw / self.profiles.voltage_v, a)
        st.observation_count += 1
        return st
