"""Energy-aware, adaptive model selection for on-device inference.

Profiles of (model, accelerator) pairs feed a battery-aware decision
engine; a discrete-event simulator compares it with fixed-model policies.
"""

from .energy import (
    BatteryState,
    EffectiveLoad,
    InferenceOutcome,
    apply_drain,
    dlei,
    effective_load,
    energy_per_inference,
    estimated_usage_time,
)
from .engine import Decision, DecisionEngine, EngineConfig, EngineMode, ModelStats, Rationale
from .errors import (
    DimensionMismatch,
    DomainError,
    EamcrError,
    EmptyInput,
    InfeasibleScenario,
    NoCandidates,
    ParseError,
    UnknownModel,
    UnknownTask,
    ValidationError,
)
from .metrics import BinaryMask, DleiRow, aggregate, dlei_table, jaccard_index, read_pbm
from .profiles import (
    AcceleratorKind,
    Diagnostic,
    ModelProfile,
    ProfileSet,
    RuntimeProfile,
    Severity,
    candidates,
    dump_profiles,
    load_profiles,
    validate_profiles,
)
from .sim import (
    ArrivalKind,
    ComparisonReport,
    EamcrPolicy,
    FixedPolicy,
    SimResult,
    Workload,
    compare_policies,
    generate_arrivals,
    run_simulation,
)

__version__ = "0.1.0"
