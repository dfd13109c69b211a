"""Measured model/accelerator characteristics and the JSON profile corpus.

A profile file looks like::

    {"device_name": "...", "voltage_v": 3.85, "idle_ma": 50,
     "models": [{"name": "ResNet", "task": "eardrum", "accuracy": 0.94,
                 "model_size_mb": 98.0,
                 "runtimes": [{"accelerator": "GPU", "latency_ms": 155,
                               "power_mw": 2400, "discharge_ma": 623.38}]}]}

Unknown keys are rejected. Two optional annotation keys are accepted:
``notes`` (top level, free text) and ``source`` (on models and runtimes,
``"reported"`` or ``"synthetic"``) so a corpus can say which numbers are
measurements and which are placeholders.

Everything here is immutable once loaded and may be shared between readers.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .energy import energy_per_inference
from .errors import ParseError, UnknownModel, UnknownTask, ValidationError

log = logging.getLogger(__name__)

#: Relative tolerance between ``discharge_ma`` and ``power_mw / voltage_v``.
CONSISTENCY_TOLERANCE = 0.05

SOURCES = ("reported", "synthetic")


class AcceleratorKind(str, enum.Enum):
    CPU_SINGLE = "CPU_SINGLE"
    CPU_MULTI = "CPU_MULTI"
    GPU = "GPU"
    NNAPI = "NNAPI"

    @classmethod
    def parse(cls, text: str) -> "AcceleratorKind":
        try:
            return cls(text)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValidationError("accelerator", text, f"expected one of {names}") from None

    def __str__(self):
        return self.value


ACCELERATOR_ORDER = {kind: i for i, kind in enumerate(AcceleratorKind)}


@dataclass(frozen=True)
class RuntimeProfile:
    accelerator: AcceleratorKind
    latency_ms: float
    power_mw: float
    discharge_ma: float
    source: Optional[str] = None


@dataclass(frozen=True)
class ModelProfile:
    name: str
    task: str
    accuracy: float
    model_size_mb: float
    runtimes: Mapping[AcceleratorKind, RuntimeProfile] = field(default_factory=dict)
    source: Optional[str] = None


@dataclass(frozen=True)
class ProfileSet:
    device_name: str
    voltage_v: float
    idle_ma: float
    models: tuple = ()
    notes: Optional[str] = None

    @property
    def tasks(self):
        return sorted({m.task for m in self.models})

    def model(self, task: str, name: str) -> ModelProfile:
        for m in self.models:
            if m.task == task and m.name == name:
                return m
        raise UnknownModel(name)


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    field: str
    value: Any
    message: str

    def __str__(self):
        return f"{self.severity.value}: {self.field}: {self.message} (got {self.value!r})"


# --- validation -------------------------------------------------------------


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x > 0


def validate_profiles(profiles: ProfileSet) -> list:
    """Check every invariant of ``profiles`` and return the diagnostics.

    Hard violations are errors. A runtime whose ``discharge_ma`` disagrees
    with ``power_mw / voltage_v`` by more than 5% only earns a warning,
    since measured current rarely matches the nominal voltage exactly.
    """
    out = []

    def err(path, value, msg):
        out.append(Diagnostic(Severity.ERROR, path, value, msg))

    if not _positive(profiles.voltage_v):
        err("voltage_v", profiles.voltage_v, "must be > 0")
    idle = profiles.idle_ma
    if not (isinstance(idle, (int, float)) and math.isfinite(idle) and idle >= 0):
        err("idle_ma", idle, "must be >= 0")

    seen = set()
    for i, m in enumerate(profiles.models):
        base = f"models[{i}]"
        if (m.task, m.name) in seen:
            err(f"{base}.name", m.name, f"duplicate model name in task {m.task!r}")
        seen.add((m.task, m.name))
        acc = m.accuracy
        if not (isinstance(acc, (int, float)) and 0.0 <= acc <= 1.0):
            err(f"{base}.accuracy", acc, "must lie in [0, 1]")
        if not _positive(m.model_size_mb):
            err(f"{base}.model_size_mb", m.model_size_mb, "must be > 0")
        if not m.runtimes:
            err(f"{base}.runtimes", [], "must not be empty")
        for kind, rt in m.runtimes.items():
            rbase = f"{base}.runtimes[{kind.value}]"
            if rt.accelerator is not kind:
                err(f"{rbase}.accelerator", rt.accelerator, "does not match its key")
            bad = False
            for name in ("latency_ms", "power_mw", "discharge_ma"):
                value = getattr(rt, name)
                if not _positive(value):
                    err(f"{rbase}.{name}", value, "must be > 0")
                    bad = True
            if bad or not _positive(profiles.voltage_v):
                continue
            expected = rt.power_mw / profiles.voltage_v
            deviation = abs(rt.discharge_ma - expected) / rt.discharge_ma
            if deviation > CONSISTENCY_TOLERANCE:
                out.append(
                    Diagnostic(
                        Severity.WARNING,
                        f"{rbase}.discharge_ma",
                        rt.discharge_ma,
                        f"deviates {deviation:.1%} from power_mw/voltage_v = {expected:.2f} mA",
                    )
                )
    return out


# --- ingestion --------------------------------------------------------------

_TOP_KEYS = {"device_name", "voltage_v", "idle_ma", "models"}
_MODEL_KEYS = {"name", "task", "accuracy", "model_size_mb", "runtimes"}
_RUNTIME_KEYS = {"accelerator", "latency_ms", "power_mw", "discharge_ma"}


def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ValidationError(path or "<document>", obj, "expected a JSON object")
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        raise ValidationError(f"{path}.{unknown[0]}" if path else unknown[0], obj[unknown[0]], "unknown key")
    missing = sorted(required - set(obj))
    if missing:
        raise ValidationError(f"{path}.{missing[0]}" if path else missing[0], None, "missing required key")


def _number(obj, key, path):
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(where, value, "expected a number")
    try:
        value = float(value)
    except OverflowError:
        raise ValidationError(where, value, "must be finite") from None
    if not math.isfinite(value):
        raise ValidationError(where, value, "must be finite")
    return value


def _string(obj, key, path):
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if not isinstance(value, str) or not value.strip():
        raise ValidationError(where, value, "expected a non-empty string")
    return value


def _source(obj, path):
    if "source" not in obj:
        return None
    value = obj["source"]
    if value not in SOURCES:
        raise ValidationError(f"{path}.source", value, f"expected one of {', '.join(SOURCES)}")
    return value


def profiles_from_dict(doc: Any, check: bool = True) -> ProfileSet:
    """Build a ProfileSet from a decoded JSON document.

    The schema (keys and value types) is always enforced. With ``check``
    the invariants are too, and the first error raises ValidationError;
    without it the caller is expected to run ``validate_profiles``.
    """
    _check_keys(doc, "", _TOP_KEYS, optional=("notes",))
    notes = doc.get("notes")
    if notes is not None and not isinstance(notes, str):
        raise ValidationError("notes", notes, "expected a string")
    if not isinstance(doc["models"], list):
        raise ValidationError("models", doc["models"], "expected a list")

    models = []
    for i, m in enumerate(doc["models"]):
        path = f"models[{i}]"
        _check_keys(m, path, _MODEL_KEYS, optional=("source",))
        if not isinstance(m["runtimes"], list):
            raise ValidationError(f"{path}.runtimes", m["runtimes"], "expected a list")
        runtimes = {}
        for j, r in enumerate(m["runtimes"]):
            rpath = f"{path}.runtimes[{j}]"
            _check_keys(r, rpath, _RUNTIME_KEYS, optional=("source",))
            if not isinstance(r["accelerator"], str):
                raise ValidationError(f"{rpath}.accelerator", r["accelerator"], "expected a string")
            try:
                kind = AcceleratorKind.parse(r["accelerator"])
            except ValidationError as e:
                raise ValidationError(f"{rpath}.accelerator", e.value, e.reason) from None
            if kind in runtimes:
                raise ValidationError(f"{rpath}.accelerator", kind.value, "duplicate runtime for accelerator")
            runtimes[kind] = RuntimeProfile(
                accelerator=kind,
                latency_ms=_number(r, "latency_ms", rpath),
                power_mw=_number(r, "power_mw", rpath),
                discharge_ma=_number(r, "discharge_ma", rpath),
                source=_source(r, rpath),
            )
        models.append(
            ModelProfile(
                name=_string(m, "name", path),
                task=_string(m, "task", path),
                accuracy=_number(m, "accuracy", path),
                model_size_mb=_number(m, "model_size_mb", path),
                runtimes=runtimes,
                source=_source(m, path),
            )
        )

    profiles = ProfileSet(
        device_name=_string(doc, "device_name", ""),
        voltage_v=_number(doc, "voltage_v", ""),
        idle_ma=_number(doc, "idle_ma", ""),
        models=tuple(models),
        notes=notes,
    )
    if not check:
        return profiles
    for d in validate_profiles(profiles):
        if d.severity is Severity.ERROR:
            raise ValidationError(d.field, d.value, d.message)
        log.warning("%s", d)
    return profiles


def _reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name}")


def parse_json(text: str, what: str = "document") -> Any:
    """Decode strict JSON, turning decoder failures into ParseError with the
    offending line quoted."""
    if text.startswith("\ufeff"):
        raise ParseError(f"{what} starts with a byte-order mark", line=1)
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        lines = text.splitlines()
        context = lines[e.lineno - 1] if 0 < e.lineno <= len(lines) else None
        raise ParseError(f"{e.msg} (column {e.colno})", line=e.lineno, context=context) from None
    except ValueError as e:
        raise ParseError(str(e)) from None


def read_text(path) -> str:
    raw = Path(path).read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"not valid UTF-8: {e}") from None


def load_profiles(path) -> ProfileSet:
    """Load and fully validate a profile corpus from ``path``.

    Raises FileNotFoundError, ParseError or ValidationError.
    """
    return profiles_from_dict(parse_json(read_text(path), "profile file"))


def profiles_to_dict(profiles: ProfileSet) -> dict:
    doc = {
        "device_name": profiles.device_name,
        "voltage_v": profiles.voltage_v,
        "idle_ma": profiles.idle_ma,
    }
    if profiles.notes is not None:
        doc["notes"] = profiles.notes
    models = []
    for m in profiles.models:
        md = {"name": m.name, "task": m.task, "accuracy": m.accuracy, "model_size_mb": m.model_size_mb}
        if m.source is not None:
            md["source"] = m.source
        runtimes = []
        for rt in m.runtimes.values():
            rd = {
                "accelerator": rt.accelerator.value,
                "latency_ms": rt.latency_ms,
                "power_mw": rt.power_mw,
                "discharge_ma": rt.discharge_ma,
            }
            if rt.source is not None:
                rd["source"] = rt.source
            runtimes.append(rd)
        md["runtimes"] = runtimes
        models.append(md)
    doc["models"] = models
    return doc


def dump_profiles(profiles: ProfileSet, path) -> None:
    Path(path).write_text(json.dumps(profiles_to_dict(profiles), indent=2) + "\n", encoding="utf-8")


# --- queries ----------------------------------------------------------------


def candidates(profiles: ProfileSet, task: str, accelerator: AcceleratorKind) -> list:
    """Models of ``task`` that can run on ``accelerator``.

    Ordered by descending accuracy, then ascending energy per inference on
    that accelerator, then name. Raises UnknownTask if no model has the task.
    """
    in_task = [m for m in profiles.models if m.task == task]
    if not in_task:
        raise UnknownTask(task)
    eligible = [m for m in in_task if accelerator in m.runtimes]
    return sorted(
        eligible,
        key=lambda m: (-m.accuracy, energy_per_inference(m.runtimes[accelerator]), m.name),
    )
