"""Event-driven battery simulation and policy comparison.

Each request arrival is one event. At an arrival the battery first pays
for the idle time since the device last finished work, then the serving
model's inference is charged in one step. Observed latency is the profile
latency times a seeded noise factor in ``[1 - a, 1 + a]``; the factor is
drawn per arrival index, so every policy run against the same workload
sees the same noise sequence. Energy is ``power * observed latency``.

A run stops when the battery is exhausted or the horizon is reached.
Exhaustion during an idle stretch is placed at the exact instant the
charge runs out; an inference the battery cannot pay for in full ends the
run at its arrival time and is not counted.

Simulated time is decoupled from wall-clock time.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .energy import BatteryState, InferenceOutcome, dlei, effective_load, mj_to_mah
from .engine import Decision, DecisionEngine, EngineConfig, EngineMode, Rationale
from .errors import InfeasibleScenario, NoCandidates, UnknownModel, ValidationError
from .profiles import AcceleratorKind, ProfileSet, candidates

#: Charge below which a battery counts as empty (absorbs float round-off).
EXHAUSTION_EPS_MAH = 1e-9
DEFAULT_HORIZON_S = 12 * 3600.0
DEFAULT_NOISE = 0.05
SAMPLE_INTERVAL_S = 60.0


class ArrivalKind(str, enum.Enum):
    FIXED_RATE = "FIXED_RATE"
    POISSON = "POISSON"
    TRACE = "TRACE"


@dataclass(frozen=True)
class Workload:
    arrival_kind: ArrivalKind
    rate_per_s: float = 0.0
    horizon_s: float = DEFAULT_HORIZON_S
    seed: int = 0
    trace: tuple = ()

    def __post_init__(self):
        if not (self.horizon_s > 0 and math.isfinite(self.horizon_s)):
            raise ValidationError("workload.horizon_s", self.horizon_s, "must be finite and > 0")
        if not (self.rate_per_s >= 0 and math.isfinite(self.rate_per_s)):
            raise ValidationError("workload.rate_per_s", self.rate_per_s, "must be finite and >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("workload.seed", self.seed, "must be a 64-bit unsigned integer")
        if self.arrival_kind is ArrivalKind.TRACE:
            prev = -math.inf
            for t in self.trace:
                if not (t > prev and 0 <= t < self.horizon_s):
                    raise ValidationError(
                        "workload.trace", t, "timestamps must be >= 0, strictly increasing and < horizon_s"
                    )
                prev = t

    @property
    def nominal_rate(self) -> float:
        if self.arrival_kind is ArrivalKind.TRACE:
            return len(self.trace) / self.horizon_s
        return self.rate_per_s


def generate_arrivals(w: Workload) -> list:
    """Arrival timestamps in seconds, strictly inside ``[0, horizon_s)``."""
    if w.arrival_kind is ArrivalKind.TRACE:
        return list(w.trace)
    if w.rate_per_s == 0:
        return []
    if w.arrival_kind is ArrivalKind.FIXED_RATE:
        n = math.ceil(w.horizon_s * w.rate_per_s) + 1
        return [k / w.rate_per_s for k in range(1, n + 1) if k / w.rate_per_s < w.horizon_s]

    rng = np.random.default_rng([w.seed, 0])
    chunk = int(w.horizon_s * w.rate_per_s * 1.1) + 64
    times = []
    t = 0.0
    while t < w.horizon_s:
        steps = np.cumsum(rng.exponential(1.0 / w.rate_per_s, size=chunk)) + t
        times.append(steps)
        t = float(steps[-1])
    out = np.concatenate(times)
    return out[out < w.horizon_s].tolist()


def noise_factors(w: Workload, n: int, amplitude: float) -> list:
    if amplitude == 0 or n == 0:
        return [1.0] * n
    if not 0 <= amplitude < 1:
        raise ValidationError("noise_amplitude", amplitude, "must lie in [0, 1)")
    rng = np.random.default_rng([w.seed, 1])
    return rng.uniform(1.0 - amplitude, 1.0 + amplitude, size=n).tolist()


# --- policies ---------------------------------------------------------------


@dataclass(frozen=True)
class FixedPolicy:
    model_name: str

    @property
    def label(self) -> str:
        return f"FIXED({self.model_name})"


@dataclass(frozen=True)
class EamcrPolicy:
    config: EngineConfig

    @property
    def label(self) -> str:
        return "EAMCR"


Policy = Union[FixedPolicy, EamcrPolicy]


# --- results ----------------------------------------------------------------


@dataclass
class SimResult:
    policy: Policy
    operating_time_s: float
    inference_count: int
    utility: float
    energy_series: list  # (timestamp_s, remaining_mah, active_model)
    decision_log: list
    initial_mah: float
    final_mah: float
    idle_drain_mah: float
    terminal_drain_mah: float
    exhausted: bool
    accelerator: AcceleratorKind
    # Parallel per-inference columns; see ``outcomes``.
    timestamps: list = field(default_factory=list, repr=False)
    served_by: list = field(default_factory=list, repr=False)
    latencies_ms: list = field(default_factory=list, repr=False)
    energies_mj: list = field(default_factory=list, repr=False)
    drains_mah: list = field(default_factory=list, repr=False)
    accuracies: list = field(default_factory=list, repr=False)

    @property
    def outcomes(self) -> list:
        return [
            InferenceOutcome(m, self.accelerator, lat, e, d, t)
            for t, m, lat, e, d in zip(
                self.timestamps, self.served_by, self.latencies_ms, self.energies_mj, self.drains_mah
            )
        ]

    @property
    def mean_dlei(self) -> float:
        if not self.inference_count:
            return 0.0
        return math.fsum(dlei(a, e) for a, e in zip(self.accuracies, self.energies_mj)) / self.inference_count

    @property
    def model_changes(self) -> int:
        names = [d.model_name for d in self.decision_log]
        return sum(1 for a, b in zip(names, names[1:]) if a != b)

    @property
    def mode_transitions(self) -> int:
        modes = [d.mode for d in self.decision_log]
        return sum(1 for a, b in zip(modes, modes[1:]) if a is not b)


@dataclass
class ComparisonReport:
    scenario_id: str
    results: list
    summary: dict
    fixed_mean_operating_time_s: Optional[float]
    seed: int
    initial_mah: float


# --- the event loop ---------------------------------------------------------


class _Sampler:
    """Per-minute samples of remaining charge during idle stretches."""

    def __init__(self, series, interval):
        self.series = series
        self.interval = interval
        self.next = interval

    def fill(self, until, remaining, idle_from, idle_ma, model):
        # samples strictly before ``until``; charge decays from idle_from on
        while self.next < until:
            t = self.next
            drained = idle_ma * max(0.0, t - idle_from) / 3600.0
            self.series.append((t, max(0.0, remaining - drained), model))
            self.next += self.interval


def run_simulation(
    profiles: ProfileSet,
    task: str,
    accelerator: AcceleratorKind,
    battery0: BatteryState,
    policy: Policy,
    w: Workload,
    *,
    noise_amplitude: float = DEFAULT_NOISE,
    sample_interval_s: float = SAMPLE_INTERVAL_S,
) -> SimResult:
    if battery0.remaining_mah <= 0:
        raise InfeasibleScenario("battery starts empty")
    pool = candidates(profiles, task, accelerator)
    if not pool:
        raise NoCandidates(f"no model for task {task!r} runs on {accelerator.value}")
    by_name = {m.name: m for m in pool}

    engine = None
    if isinstance(policy, EamcrPolicy):
        config = policy.config
        if config.accelerator is not accelerator:
            config = replace(config, accelerator=accelerator)
        engine = DecisionEngine(profiles, task, config, battery0.design_capacity_mah)
    elif policy.model_name not in by_name:
        raise UnknownModel(policy.model_name)

    arrivals = generate_arrivals(w)
    factors = noise_factors(w, len(arrivals), noise_amplitude)
    rate = w.nominal_rate
    idle = profiles.idle_ma
    capacity = battery0.design_capacity_mah
    volts = battery0.voltage_v
    mah_per_mj = mj_to_mah(1.0, volts)

    rem = battery0.remaining_mah
    idle_total = 0.0
    terminal = 0.0
    exhausted = False
    op_time = w.horizon_s
    idle_from = 0.0
    count = 0
    utility = 0.0
    ts, served, lats, ens, drs, accs = [], [], [], [], [], []
    log = []
    series = [(0.0, rem, "")]
    sampler = _Sampler(series, sample_interval_s)

    model = rt = acc = None
    last = None
    if engine is None:
        m = by_name[policy.model_name]
        model, rt, acc = m.name, m.runtimes[accelerator], m.accuracy
        series[0] = (0.0, rem, model)

    for t, f in zip(arrivals, factors):
        # idle drain since the device last went quiet
        if idle > 0 and t > idle_from:
            d = idle * (t - idle_from) / 3600.0
            if d >= rem:
                t_ex = idle_from + rem * 3600.0 / idle
                sampler.fill(t_ex, rem, idle_from, idle, model or "")
                idle_total += rem
                rem = 0.0
                op_time, exhausted = t_ex, True
                series.append((t_ex, 0.0, model or ""))
                break
            sampler.fill(t, rem, idle_from, idle, model or "")
            rem -= d
            idle_total += d
        else:
            sampler.fill(t, rem, math.inf, 0.0, model or "")

        if engine is not None:
            battery = BatteryState(capacity, rem, volts)
            engine.observe_battery(battery)
            dec = engine.select_model(battery, rate)
            if not dec.same_choice(last):
                last = replace(dec, timestamp_s=t)
                log.append(last)
            if dec.model_name != model:
                m = by_name[dec.model_name]
                model, rt, acc = m.name, m.runtimes[accelerator], m.accuracy
        elif last is None:
            usage = rem / max(effective_load(rt, idle, rate).effective_discharge_ma, 1e-300)
            last = Decision(model, accelerator, EngineMode.OPEN_ACCESS, Rationale.USER_CHOICE, usage, t)
            log.append(last)

        lat = rt.latency_ms * f
        energy = rt.power_mw * lat / 1000.0
        drain = energy * mah_per_mj
        if drain > rem + EXHAUSTION_EPS_MAH:
            terminal = rem
            rem = 0.0
            op_time, exhausted = t, True
            series.append((t, 0.0, model))
            break
        rem = rem - drain if drain < rem else 0.0
        count += 1
        utility += acc
        ts.append(t)
        served.append(model)
        lats.append(lat)
        ens.append(energy)
        drs.append(drain)
        accs.append(acc)
        if engine is not None:
            engine.record_feedback(InferenceOutcome(model, accelerator, lat, energy, drain, t))
        idle_from = t + lat / 1000.0
        series.append((t, rem, model))
        if rem <= EXHAUSTION_EPS_MAH:
            op_time, exhausted = t, True
            break
    else:
        # no more arrivals: idle until the horizon
        end = w.horizon_s
        if idle > 0 and end > idle_from:
            d = idle * (end - idle_from) / 3600.0
            if d >= rem:
                end = idle_from + rem * 3600.0 / idle
                d = rem
                exhausted = True
            sampler.fill(end, rem, idle_from, idle, model or "")
            rem -= d
            idle_total += d
            if exhausted:
                rem = 0.0
        else:
            sampler.fill(end, rem, math.inf, 0.0, model or "")
        op_time = end
        series.append((end, rem, model or ""))

    return SimResult(
        policy=policy,
        operating_time_s=op_time,
        inference_count=count,
        utility=utility,
        energy_series=series,
        decision_log=log,
        initial_mah=battery0.remaining_mah,
        final_mah=rem,
        idle_drain_mah=idle_total,
        terminal_drain_mah=terminal,
        exhausted=exhausted,
        accelerator=accelerator,
        timestamps=ts,
        served_by=served,
        latencies_ms=lats,
        energies_mj=ens,
        drains_mah=drs,
        accuracies=accs,
    )


def compare_policies(
    profiles: ProfileSet,
    task: str,
    accelerator: AcceleratorKind,
    battery0: BatteryState,
    policies: list,
    w: Workload,
    *,
    scenario_id: str = "scenario",
    noise_amplitude: float = DEFAULT_NOISE,
) -> ComparisonReport:
    """Run every policy against the same workload and starting battery."""
    if len(policies) < 2:
        raise ValidationError("policies", len(policies), "a comparison needs at least two policies")
    labels = [p.label for p in policies]
    dupes = sorted({x for x in labels if labels.count(x) > 1})
    if dupes:
        raise ValidationError("policies", dupes[0], "duplicate policy")

    results = [
        run_simulation(profiles, task, accelerator, battery0, p, w, noise_amplitude=noise_amplitude)
        for p in policies
    ]
    summary = {
        r.policy.label: {
            "operating_time_s": r.operating_time_s,
            "inference_count": r.inference_count,
            "utility": r.utility,
            "mean_dlei": r.mean_dlei,
        }
        for r in results
    }
    fixed = [r.operating_time_s for r in results if isinstance(r.policy, FixedPolicy)]
    return ComparisonReport(
        scenario_id=scenario_id,
        results=results,
        summary=summary,
        fixed_mean_operating_time_s=statistics.fmean(fixed) if fixed else None,
        seed=w.seed,
        initial_mah=battery0.remaining_mah,
    )
