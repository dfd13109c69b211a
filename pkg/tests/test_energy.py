import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eamcr.energy import (
    BatteryState,
    EffectiveLoad,
    apply_drain,
    dlei,
    effective_load,
    energy_per_inference,
    estimated_usage_time,
    mj_to_mah,
)
from eamcr.errors import DomainError
from eamcr.profiles import RuntimeProfile

from conftest import CPU, GPU, runtime

pos = st.floats(1e-3, 1e6, allow_nan=False)


def load(ma):
    return EffectiveLoad(1.0, 1.0, ma)


class TestEnergyPerInference:
    # power (mW) * latency (ms) / 1000, worked by hand
    @pytest.mark.parametrize(
        "latency, power, expected",
        [(155, 2400, 372.0), (645, 2290, 1477.05), (1000, 1000, 1000.0)],
    )
    def test_values(self, latency, power, expected):
        assert energy_per_inference(runtime(GPU, latency, power)) == pytest.approx(expected, rel=1e-12)

    @given(pos, pos)
    def test_product(self, lat, pw):
        e = energy_per_inference(RuntimeProfile(CPU, lat, pw, pw / 3.85))
        assert math.isclose(e, pw * lat / 1000.0, rel_tol=1e-9)


class TestDlei:
    def test_substitution(self):
        # 360 mJ = 0.1 mWh
        assert dlei(0.9, 360.0) == pytest.approx(9.0, rel=1e-12)

    def test_zero_accuracy(self):
        assert dlei(0.0, 123.0) == 0.0

    def test_halving_energy_doubles(self):
        assert dlei(0.7, 100.0) == pytest.approx(2 * dlei(0.7, 200.0), rel=1e-12)

    @pytest.mark.parametrize("acc, e", [(1.1, 1.0), (-0.1, 1.0), (0.5, 0.0), (0.5, -1.0), (0.5, math.inf), (0.5, math.nan)])
    def test_domain(self, acc, e):
        with pytest.raises(DomainError):
            dlei(acc, e)


class TestUsageTime:
    def test_values(self):
        assert estimated_usage_time(BatteryState(4000, 2000, 3.85), load(500)) == 4.0
        assert estimated_usage_time(BatteryState(4000, 1500, 3.85), load(600)) == 2.5
        assert estimated_usage_time(BatteryState(4000, 0, 3.85), load(600)) == 0.0

    def test_zero_current(self):
        with pytest.raises(DomainError):
            estimated_usage_time(BatteryState(4000, 2000, 3.85), load(0))


class TestDrain:
    def test_mah_conversion(self):
        # 372 mJ at 3.85 V: 372 / (3600 * 3.85) mAh
        assert mj_to_mah(372.0, 3.85) == pytest.approx(0.026840, abs=1e-6)

    def test_drain_example(self):
        b, ex = apply_drain(BatteryState(4000, 4000, 3.85), mj_to_mah(372.0, 3.85))
        assert b.remaining_mah == pytest.approx(3999.973, abs=1e-3)
        assert not ex

    def test_zero_drain(self):
        b0 = BatteryState(4000, 1234, 3.85)
        assert apply_drain(b0, 0.0) == (b0, False)

    def test_floor(self):
        b, ex = apply_drain(BatteryState(4000, 1, 3.85), 5)
        assert b.remaining_mah == 0 and ex

    @given(st.floats(0, 4000), st.floats(0, 5000))
    def test_never_negative(self, rem, drain):
        b, ex = apply_drain(BatteryState(4000, rem, 3.85), drain)
        assert 0 <= b.remaining_mah <= rem
        assert ex == (b.remaining_mah == 0)

    @pytest.mark.parametrize("cap, rem, v", [(0, 0, 3.85), (100, 101, 3.85), (100, -1, 3.85), (100, 50, 0)])
    def test_battery_invariants(self, cap, rem, v):
        with pytest.raises(DomainError):
            BatteryState(cap, rem, v)


class TestEffectiveLoad:
    def test_half_duty(self):
        rt = RuntimeProfile(CPU, 500, 2310, 600)
        el = effective_load(rt, 100, 1.0)
        assert (el.duty_cycle, el.effective_discharge_ma) == (0.5, 350.0)

    def test_zero_rate(self):
        el = effective_load(RuntimeProfile(CPU, 500, 2310, 600), 100, 0.0)
        assert (el.duty_cycle, el.effective_discharge_ma) == (0.0, 100.0)

    def test_clamped_duty(self):
        el = effective_load(RuntimeProfile(CPU, 2000, 2310, 600), 100, 1.0)
        assert (el.duty_cycle, el.effective_discharge_ma) == (1.0, 600.0)

    def test_never_below_idle(self):
        el = effective_load(RuntimeProfile(CPU, 500, 100, 20), 100, 1.0)
        assert el.effective_discharge_ma == 100.0

    @given(pos, pos, st.floats(0, 500), st.floats(0, 100))
    def test_formula(self, lat, dis, idle, rate):
        el = effective_load(RuntimeProfile(CPU, lat, dis * 3.85, dis), idle, rate)
        duty = min(1.0, rate * lat / 1000.0)
        assert el.duty_cycle == duty
        assert math.isclose(el.effective_discharge_ma, max(idle, idle + duty * (dis - idle)), rel_tol=1e-12)
        assert el.effective_discharge_ma >= idle
