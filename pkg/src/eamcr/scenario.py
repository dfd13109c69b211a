"""Scenario files: what to simulate, on which battery, under which policies.

Example::

    {
      "scenario_id": "skin-lesion-cpu",
      "profiles": "../profiles.json",
      "task": "skin-lesion",
      "accelerator": "CPU_SINGLE",
      "battery": {"design_capacity_mah": 4000, "remaining_mah": 4000, "voltage_v": 3.85},
      "workload": {"arrival_kind": "FIXED_RATE", "rate_per_s": 1.0, "horizon_s": 86400, "seed": 7},
      "policies": [{"kind": "EAMCR"}, {"kind": "FIXED", "model": "*"}],
      "engine": {"threshold_mah": 1500, "accuracy_region": [0.75, 1.0],
                 "planned_hours": 4.7, "feedback_alpha": 0.2},
      "noise_amplitude": 0.05
    }

``scenario_id``, ``profiles`` (resolved relative to the scenario file) and
``noise_amplitude`` are optional. ``{"kind": "FIXED", "model": "*"}``
expands to one fixed policy per eligible model. ``engine`` is required
when an EAMCR policy is listed and may also carry ``user_model_choice``
and ``active_only_discharge``. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .energy import BatteryState
from .engine import EngineConfig
from .errors import DomainError, ValidationError
from .profiles import AcceleratorKind, ProfileSet, _check_keys, _number, _string, candidates, parse_json, read_text
from .sim import DEFAULT_HORIZON_S, DEFAULT_NOISE, ArrivalKind, EamcrPolicy, FixedPolicy, Workload

_TOP = {"task", "accelerator", "battery", "workload", "policies"}
_TOP_OPTIONAL = ("engine", "scenario_id", "profiles", "noise_amplitude")
_BATTERY = {"design_capacity_mah", "remaining_mah", "voltage_v"}
_WORKLOAD = {"arrival_kind"}
_WORKLOAD_OPTIONAL = ("rate_per_s", "horizon_s", "seed", "trace")
_ENGINE = {"threshold_mah", "accuracy_region", "planned_hours"}
_ENGINE_OPTIONAL = ("feedback_alpha", "user_model_choice", "active_only_discharge")


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    task: str
    accelerator: AcceleratorKind
    battery: BatteryState
    workload: Workload
    policy_specs: tuple
    engine: Optional[EngineConfig] = None
    noise_amplitude: float = DEFAULT_NOISE
    profiles_path: Optional[Path] = None

    def policies(self, profiles: ProfileSet) -> list:
        """Concrete policies, expanding ``FIXED *`` against ``profiles``."""
        out = []
        for kind, model in self.policy_specs:
            if kind == "EAMCR":
                out.append(EamcrPolicy(self.engine))
            elif model == "*":
                out.extend(FixedPolicy(m.name) for m in candidates(profiles, self.task, self.accelerator))
            else:
                out.append(FixedPolicy(model))
        return out


def _battery(doc) -> BatteryState:
    _check_keys(doc, "battery", _BATTERY)
    values = {k: _number(doc, k, "battery") for k in sorted(_BATTERY)}
    try:
        return BatteryState(**values)
    except DomainError as e:
        raise ValidationError("battery", doc, str(e)) from None


def _workload(doc) -> Workload:
    _check_keys(doc, "workload", _WORKLOAD, _WORKLOAD_OPTIONAL)
    try:
        kind = ArrivalKind(doc["arrival_kind"])
    except (ValueError, TypeError):
        raise ValidationError("workload.arrival_kind", doc["arrival_kind"], "expected FIXED_RATE, POISSON or TRACE")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError("workload.seed", seed, "expected an integer")
    trace = doc.get("trace", [])
    if not isinstance(trace, list):
        raise ValidationError("workload.trace", trace, "expected a list")
    trace = tuple(_number({"t": t}, "t", "workload.trace") for t in trace)
    if kind is not ArrivalKind.TRACE and "rate_per_s" not in doc:
        raise ValidationError("workload.rate_per_s", None, f"required for {kind.value}")
    return Workload(
        arrival_kind=kind,
        rate_per_s=_number(doc, "rate_per_s", "workload") if "rate_per_s" in doc else 0.0,
        horizon_s=_number(doc, "horizon_s", "workload") if "horizon_s" in doc else DEFAULT_HORIZON_S,
        seed=seed,
        trace=trace,
    )


def _engine(doc, accelerator) -> EngineConfig:
    _check_keys(doc, "engine", _ENGINE, _ENGINE_OPTIONAL)
    region = doc["accuracy_region"]
    if not (isinstance(region, list) and len(region) == 2):
        raise ValidationError("engine.accuracy_region", region, "expected [lo, hi]")
    region = tuple(_number({"x": x}, "x", "engine.accuracy_region") for x in region)
    choice = doc.get("user_model_choice")
    if choice is not None and not isinstance(choice, str):
        raise ValidationError("engine.user_model_choice", choice, "expected a string")
    active_only = doc.get("active_only_discharge", False)
    if not isinstance(active_only, bool):
        raise ValidationError("engine.active_only_discharge", active_only, "expected true or false")
    return EngineConfig(
        threshold_mah=_number(doc, "threshold_mah", "engine"),
        accuracy_region=region,
        planned_hours=_number(doc, "planned_hours", "engine"),
        feedback_alpha=_number(doc, "feedback_alpha", "engine") if "feedback_alpha" in doc else 0.2,
        accelerator=accelerator,
        user_model_choice=choice,
        active_only_discharge=active_only,
    )


def _policy_specs(items) -> tuple:
    if not isinstance(items, list) or not items:
        raise ValidationError("policies", items, "expected a non-empty list")
    specs = []
    for i, p in enumerate(items):
        path = f"policies[{i}]"
        if not isinstance(p, dict):
            raise ValidationError(path, p, "expected an object")
        kind = p.get("kind")
        if kind == "EAMCR":
            _check_keys(p, path, {"kind"})
            specs.append(("EAMCR", None))
        elif kind == "FIXED":
            _check_keys(p, path, {"kind", "model"})
            specs.append(("FIXED", _string(p, "model", path)))
        else:
            raise ValidationError(f"{path}.kind", kind, "expected FIXED or EAMCR")
    return tuple(specs)


def scenario_from_dict(doc, base_dir=None, default_id="scenario") -> Scenario:
    _check_keys(doc, "", _TOP, _TOP_OPTIONAL)
    if not isinstance(doc["accelerator"], str):
        raise ValidationError("accelerator", doc["accelerator"], "expected a string")
    accelerator = AcceleratorKind.parse(doc["accelerator"])
    specs = _policy_specs(doc["policies"])
    engine = None
    if "engine" in doc:
        engine = _engine(doc["engine"], accelerator)
    elif any(kind == "EAMCR" for kind, _ in specs):
        raise ValidationError("engine", None, "an EAMCR policy needs an engine section")
    battery = _battery(doc["battery"])
    if engine is not None and engine.threshold_mah > battery.design_capacity_mah:
        raise ValidationError("engine.threshold_mah", engine.threshold_mah, "exceeds the battery design capacity")
    noise = _number(doc, "noise_amplitude", "") if "noise_amplitude" in doc else DEFAULT_NOISE
    if not 0 <= noise < 1:
        raise ValidationError("noise_amplitude", noise, "must lie in [0, 1)")
    profiles_path = None
    if "profiles" in doc:
        profiles_path = Path(_string(doc, "profiles", ""))
        if base_dir is not None and not profiles_path.is_absolute():
            profiles_path = Path(base_dir) / profiles_path
    return Scenario(
        scenario_id=_string(doc, "scenario_id", "") if "scenario_id" in doc else default_id,
        task=_string(doc, "task", ""),
        accelerator=accelerator,
        battery=battery,
        workload=_workload(doc["workload"]),
        policy_specs=specs,
        engine=engine,
        noise_amplitude=noise,
        profiles_path=profiles_path,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    doc = parse_json(read_text(path), "scenario file")
    return scenario_from_dict(doc, base_dir=path.parent, default_id=path.stem)
