import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eamcr.energy import BatteryState, InferenceOutcome
from eamcr.engine import DecisionEngine, EngineConfig, EngineMode, Rationale, ema
from eamcr.errors import UnknownModel, ValidationError

from conftest import GPU, model, profile_set

# Two GPU models at 4 V with duty 1 (1000 ms latency, one request per
# second), so effective current = power / 4:
#   A: accuracy 0.95, 2000 mW -> 500 mA, 2000 mJ
#   B: accuracy 0.85, 1000 mW -> 250 mA, 1000 mJ
# At 1000 mAh remaining A lasts 2 h and B lasts 4 h.
PAIR = profile_set(
    model("A", 0.95, GPU=(1000, 2000, 4.0)),
    model("B", 0.85, GPU=(1000, 1000, 4.0)),
    voltage=4.0,
)


def engine(planned=3.0, th=1500.0, region=(0.0, 1.0), profiles=PAIR, **kw):
    cfg = EngineConfig(th, region, planned, 0.2, GPU, **kw)
    return DecisionEngine(profiles, "t", cfg, 4000.0)


def battery(rem):
    return BatteryState(4000.0, rem, 4.0)


class TestMode:
    def test_threshold_inclusive(self):
        e = engine()
        assert e.observe_battery(battery(1500.0)) is EngineMode.ENERGY_EFFICIENT

    def test_above_threshold(self):
        e = engine()
        assert e.observe_battery(battery(3999.0)) is EngineMode.OPEN_ACCESS

    def test_latch(self):
        e = engine()
        e.observe_battery(battery(1400.0))
        assert e.observe_battery(battery(1600.0)) is EngineMode.ENERGY_EFFICIENT

    def test_reset_on_recharge(self):
        e = engine()
        e.observe_battery(battery(1200.0))
        before = {k: vars(v).copy() for k, v in e.stats.items()}
        assert e.reset_on_recharge(battery(1200.0)) is EngineMode.ENERGY_EFFICIENT
        assert e.reset_on_recharge(battery(4000.0)) is EngineMode.OPEN_ACCESS
        assert {k: vars(v) for k, v in e.stats.items()} == before

    def test_threshold_at_capacity_switches_immediately(self):
        e = engine(th=4000.0)
        assert e.observe_battery(battery(4000.0)) is EngineMode.ENERGY_EFFICIENT

    def test_threshold_above_capacity_rejected(self):
        with pytest.raises(ValidationError):
            engine(th=4000.1)

    @pytest.mark.parametrize("kw", [{"region": (0.9, 0.1)}, {"planned": 0.0}, {"region": (0.0, 1.5)}])
    def test_config_checked(self, kw):
        with pytest.raises(ValidationError):
            engine(**kw)


class TestSelect:
    def test_open_access_highest_accuracy(self):
        d = engine().select_model(battery(4000.0), 1.0)
        assert (d.model_name, d.mode, d.rationale) == ("A", EngineMode.OPEN_ACCESS, Rationale.ACCURACY_MAX_FEASIBLE)
        assert d.estimated_usage_h == pytest.approx(8.0)

    def test_open_access_user_choice(self):
        d = engine(user_model_choice="B").select_model(battery(4000.0), 1.0)
        assert (d.model_name, d.rationale) == ("B", Rationale.USER_CHOICE)

    def test_ineligible_user_choice_ignored(self):
        d = engine(user_model_choice="nope").select_model(battery(4000.0), 1.0)
        assert (d.model_name, d.rationale) == ("A", Rationale.ACCURACY_MAX_FEASIBLE)

    def test_most_accurate_feasible(self):
        e = engine(planned=3.0, user_model_choice="A")
        e.observe_battery(battery(1000.0))
        d = e.select_model(battery(1000.0), 1.0)
        assert (d.model_name, d.rationale) == ("B", Rationale.ACCURACY_MAX_FEASIBLE)
        assert d.estimated_usage_h == pytest.approx(4.0)

    def test_both_feasible_keeps_accuracy(self):
        e = engine(planned=2.0)
        e.observe_battery(battery(1000.0))
        assert e.select_model(battery(1000.0), 1.0).model_name == "A"

    def test_dlei_fallback(self):
        # A: 0.95 / (2000/3600) = 1.71, B: 0.85 / (1000/3600) = 3.06
        e = engine(planned=10.0)
        e.observe_battery(battery(1000.0))
        d = e.select_model(battery(1000.0), 1.0)
        assert (d.model_name, d.rationale) == ("B", Rationale.DLEI_FALLBACK)
        assert d.estimated_usage_h == pytest.approx(4.0)

    def test_dlei_tie_prefers_accuracy(self):
        # 0.9 / 1800 mJ == 0.45 / 900 mJ
        p = profile_set(model("A", 0.9, GPU=(1000, 1800)), model("B", 0.45, GPU=(500, 1800)))
        e = engine(planned=1e6, profiles=p)
        e.observe_battery(battery(100.0))
        assert e.select_model(battery(100.0), 1.0).model_name == "A"

    def test_region_filters(self):
        e = engine(planned=1.0, region=(0.0, 0.9))
        e.observe_battery(battery(1000.0))
        assert e.select_model(battery(1000.0), 1.0).model_name == "B"

    def test_empty_region_relaxed_with_one_warning(self, caplog):
        e = engine(planned=1.0, region=(0.99, 1.0))
        e.observe_battery(battery(1000.0))
        with caplog.at_level(logging.WARNING, logger="eamcr.engine"):
            d1 = e.select_model(battery(1000.0), 1.0)
            e.select_model(battery(1000.0), 1.0)
        assert d1.model_name == "A"
        assert len([r for r in caplog.records if r.levelno == logging.WARNING]) == 1

    def test_skin_lesion_gpu_starts_with_inception(self, corpus):
        cfg = EngineConfig(1500.0, (0.75, 1.0), 4.7, 0.2, GPU)
        d = DecisionEngine(corpus, "skin-lesion", cfg, 4000.0).select_model(BatteryState(4000, 4000, 3.85), 1.0)
        assert d.model_name == "Inception"

    def test_user_choice_only_in_open_access(self):
        e = engine(user_model_choice="A", planned=3.0)
        e.observe_battery(battery(1000.0))
        assert e.select_model(battery(1000.0), 1.0).rationale is not Rationale.USER_CHOICE


class TestFeedback:
    def outcome(self, lat, energy, name="A"):
        return InferenceOutcome(name, GPU, lat, energy, 0.0, 0.0)

    def test_initial_stats_are_profile_values(self):
        st_ = engine().stats["A"]
        assert (st_.ema_latency_ms, st_.ema_energy_mj, st_.ema_discharge_ma, st_.observation_count) == (1000, 2000, 500, 0)

    def test_alpha_one_replaces(self):
        e = DecisionEngine(PAIR, "t", EngineConfig(1500, feedback_alpha=1.0, accelerator=GPU), 4000)
        st_ = e.record_feedback(self.outcome(200.0, 400.0))
        assert st_.ema_latency_ms == 200.0 and st_.ema_energy_mj == 400.0
        # 400 mJ over 200 ms is 2000 mW, 500 mA at 4 V
        assert st_.ema_discharge_ma == pytest.approx(500.0)

    def test_fixed_point(self):
        assert ema(100.0, 100.0, 0.2) == 100.0

    def test_converges_in_25_updates(self):
        prior, obs = 100.0, 200.0
        oracle = obs + (prior - obs) * 0.8**25
        x = prior
        for _ in range(25):
            x = ema(x, obs, 0.2)
        assert x == pytest.approx(oracle, rel=1e-12)
        assert abs(x - obs) / obs <= 0.01

    def test_unknown_model(self):
        with pytest.raises(UnknownModel):
            engine().record_feedback(self.outcome(1.0, 1.0, name="Z"))

    def test_counts(self):
        e = engine()
        for _ in range(3):
            e.record_feedback(self.outcome(900.0, 1900.0))
        assert e.stats["A"].observation_count == 3 and e.stats["B"].observation_count == 0

    @given(st.lists(st.tuples(st.floats(1, 5000), st.floats(1, 1e5)), max_size=40), st.floats(0.01, 1.0))
    def test_emas_stay_positive_and_bounded(self, obs, alpha):
        e = DecisionEngine(PAIR, "t", EngineConfig(1500, feedback_alpha=alpha, accelerator=GPU), 4000)
        lats = [1000.0] + [o[0] for o in obs]
        for lat, energy in obs:
            e.record_feedback(self.outcome(lat, energy))
        s = e.stats["A"]
        assert s.ema_latency_ms > 0 and s.ema_energy_mj > 0 and s.ema_discharge_ma > 0
        assert min(lats) - 1e-9 <= s.ema_latency_ms <= max(lats) + 1e-9
