"""Battery bookkeeping and per-inference energy accounting.

Units: energy is carried in millijoules internally and reported in mWh;
charge in mAh; current in mA; latency in ms. At a constant nominal
voltage V, 1 mAh of charge holds 3600 * V mJ (3.6 C times V volts).

The battery is a linear coulomb counter: no temperature, ageing or
voltage sag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

from .errors import DomainError

if TYPE_CHECKING:
    from .profiles import AcceleratorKind, RuntimeProfile

MJ_PER_MWH = 3600.0


def mj_to_mwh(energy_mj: float) -> float:
    return energy_mj / MJ_PER_MWH


def mj_to_mah(energy_mj: float, voltage_v: float) -> float:
    """Charge drawn from a battery at ``voltage_v`` to deliver ``energy_mj``."""
    return energy_mj / (3600.0 * voltage_v)


@dataclass(frozen=True)
class BatteryState:
    design_capacity_mah: float
    remaining_mah: float
    voltage_v: float

    def __post_init__(self):
        if not self.design_capacity_mah > 0:
            raise DomainError(f"design_capacity_mah must be > 0, got {self.design_capacity_mah}")
        if not self.voltage_v > 0:
            raise DomainError(f"voltage_v must be > 0, got {self.voltage_v}")
        if not 0 <= self.remaining_mah <= self.design_capacity_mah:
            raise DomainError(
                f"remaining_mah must lie in [0, {self.design_capacity_mah}], got {self.remaining_mah}"
            )

    @property
    def fraction(self) -> float:
        return self.remaining_mah / self.design_capacity_mah


@dataclass(frozen=True)
class InferenceOutcome:
    model_name: str
    accelerator: "AcceleratorKind"
    latency_ms: float
    energy_mj: float
    drain_mah: float
    timestamp_s: float


@dataclass(frozen=True)
class EffectiveLoad:
    request_rate_per_s: float
    duty_cycle: float
    effective_discharge_ma: float


def energy_per_inference(rt: "RuntimeProfile") -> float:
    """Energy of one inference in mJ: average active power times latency."""
    return rt.power_mw * rt.latency_ms / 1000.0


def dlei(accuracy: float, energy_mj: float) -> float:
    """Efficiency index: accuracy per mWh of energy spent on one inference.

    Higher is better. The mWh denominator only fixes the scale; rankings
    between models do not depend on it.
    """
    if not 0.0 <= accuracy <= 1.0:
        raise DomainError(f"accuracy must lie in [0, 1], got {accuracy}")
    if not energy_mj > 0 or math.isinf(energy_mj):
        raise DomainError(f"energy_mj must be finite and > 0, got {energy_mj}")
    return accuracy / mj_to_mwh(energy_mj)


def estimated_usage_time(battery: BatteryState, load: EffectiveLoad) -> float:
    """Hours left: remaining capacity (mAh) over total discharge (mA)."""
    if not load.effective_discharge_ma > 0:
        raise DomainError(f"effective discharge must be > 0, got {load.effective_discharge_ma}")
    return battery.remaining_mah / load.effective_discharge_ma


def apply_drain(battery: BatteryState, drain_mah: float):
    """Remove ``drain_mah`` from the battery, flooring at zero.

    Returns ``(new_state, exhausted)`` where ``exhausted`` is true when the
    floor was reached.
    """
    if drain_mah < 0:
        raise DomainError(f"drain must be >= 0, got {drain_mah}")
    if drain_mah == 0:
        return battery, battery.remaining_mah <= 0
    remaining = battery.remaining_mah - drain_mah
    if remaining <= 0:
        return replace(battery, remaining_mah=0.0), True
    return replace(battery, remaining_mah=remaining), False


def effective_load(rt: "RuntimeProfile", idle_ma: float, request_rate_per_s: float) -> EffectiveLoad:
    """Average current under a request stream.

    The device is active for ``rate * latency`` of each second (capped at
    1) and idles at ``idle_ma`` otherwise.
    """
    duty = min(1.0, request_rate_per_s * rt.latency_ms / 1000.0)
    current = idle_ma + duty * (rt.discharge_ma - idle_ma)
    return EffectiveLoad(request_rate_per_s, duty, max(idle_ma, current))
