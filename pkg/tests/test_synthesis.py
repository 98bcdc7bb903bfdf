"""Tests for pulse-train synthesis and ideal bridge voltages."""

import numpy as np
import pytest

from conftest import chain_rp, rec
from notchpwm import (
    MalformedRecordsError,
    ModulatorConfig,
    RateTooLowError,
    StrategyKind,
    StrategySpec,
    line_voltage,
    phase_voltages,
    pulse_train,
    sample,
    schedule,
    voltage_segments,
)


def test_single_cycle_edges():
    train = pulse_train([rec(1, 0.0, 0.004, 0.5, 0.25)], "a")
    assert train.times == pytest.approx([0.001, 0.003], abs=1e-15)
    assert list(train.levels) == [1.0, 0.0]
    assert train.duration == 0.004
    assert train.max_switching_freq == 250.0


def test_zero_duty_emits_no_edges():
    train = pulse_train([rec(1, 0.0, 0.004, 0.0, 0.5)], "a")
    assert train.times.size == 0
    assert train.duration == 0.004


def test_empty_records():
    train = pulse_train([], "a")
    assert train.times.size == 0
    assert train.duration == 0.0
    assert sample(train, 1000.0).values.size == 0


def test_adjacent_full_duty_pulses_merge():
    records = [rec(1, 0.0, 0.004, 1.0, 0.0), rec(2, 0.004, 0.004, 1.0, 0.0)]
    train = pulse_train(records, "a")
    assert train.times == pytest.approx([0.0, 0.008])
    assert list(train.levels) == [1.0, 0.0]


def test_pulse_width_is_duty_times_period():
    # volt-seconds per cycle do not depend on the pulse position
    for r in (0.0, 0.17, 0.5):
        train = pulse_train([rec(1, 0.0, 4e-4, 0.5, r)], "a")
        width = train.times[1] - train.times[0]
        assert width == pytest.approx(0.5 * 4e-4, rel=1e-12)


def test_phase_selection():
    records = [rec(1, 0.0, 0.004, 0.5, 0.25)]
    assert pulse_train(records, "b").times.size == 0  # b idle in rec()
    with pytest.raises(ValueError):
        pulse_train(records, "d")


def test_malformed_records_raise():
    with pytest.raises(MalformedRecordsError):
        pulse_train([rec(1, 0.0, -1e-3, 0.5, 0.2)], "a")
    with pytest.raises(MalformedRecordsError):
        # gap between cycles
        pulse_train([rec(1, 0.0, 0.004, 0.5, 0.2), rec(2, 0.005, 0.004, 0.5, 0.2)], "a")
    with pytest.raises(MalformedRecordsError):
        pulse_train([rec(1, 0.0, 0.004, 1.5, 0.0)], "a")
    with pytest.raises(MalformedRecordsError):
        # position pushes the pulse past the cycle end
        pulse_train([rec(1, 0.0, 0.004, 0.5, 0.9)], "a")


def test_sample_count_and_levels():
    train = pulse_train([rec(1, 0.0, 0.004, 0.5, 0.25)], "a")
    wave = sample(train, 1e6)
    assert wave.values.size == 4000
    assert set(np.unique(wave.values)) <= {0.0, 1.0}
    assert wave.rate == 1e6
    assert wave.times[0] == 0.0


def test_edge_on_sample_instant_switches_at_that_sample():
    # rise at exactly sample 1000, fall at exactly sample 3000
    train = pulse_train([rec(1, 0.0, 0.004, 0.5, 0.25)], "a")
    wave = sample(train, 1e6)
    assert wave.values[999] == 0.0
    assert wave.values[1000] == 1.0
    assert wave.values[2999] == 1.0
    assert wave.values[3000] == 0.0


def test_sample_rate_guard():
    train = pulse_train([rec(1, 0.0, 4e-4, 0.5, 0.25)], "a")
    with pytest.raises(RateTooLowError):
        sample(train, 100e3)
    with pytest.raises(ValueError):
        sample(train, 0.0)


def test_per_cycle_sampled_mean_matches_duty():
    records = chain_rp(50, seed=31)
    train = pulse_train(records, "a")
    wave = sample(train, 1e6)
    for r in records:
        lo = int(round(r.t_m * 1e6))
        hi = int(round((r.t_m + r.ts) * 1e6))
        mean = float(np.mean(wave.values[lo:hi]))
        assert abs(mean - r.duty[0]) <= 2.0 / (1e6 * r.ts)


def test_bridge_voltages_worked_example():
    one = np.array([1.0])
    zero = np.array([0.0])
    u_a, u_b, u_c = phase_voltages(one, zero, zero, 24.0)
    assert (u_a[0], u_b[0], u_c[0]) == (16.0, -8.0, -8.0)


def test_bridge_voltages_sum_to_zero():
    rng = np.random.default_rng(5)
    x = rng.integers(0, 2, size=(3, 1000)).astype(float)
    u_a, u_b, u_c = phase_voltages(x[0], x[1], x[2], 24.0)
    assert np.all(u_a + u_b + u_c == 0.0)


def test_line_voltage_values():
    x_a = np.array([1.0, 0.0, 1.0, 0.0])
    x_b = np.array([0.0, 1.0, 1.0, 0.0])
    assert list(line_voltage(x_a, x_b, 24.0)) == [24.0, -24.0, 0.0, 0.0]


def test_line_voltage_equals_phase_difference():
    rng = np.random.default_rng(6)
    x = rng.integers(0, 2, size=(3, 1000)).astype(float)
    u_a, u_b, _ = phase_voltages(x[0], x[1], x[2], 24.0)
    assert np.array_equal(line_voltage(x[0], x[1], 24.0), u_a - u_b)


def test_voltage_segments_match_sampled_voltage():
    mod = ModulatorConfig(m_index=0.7, f1=50.0, u_dc=24.0)
    spec = StrategySpec(kind=StrategyKind.RP, fs=2500.0)
    res = schedule(spec, mod, 0.02, 8)
    trains = [pulse_train(res.records, p) for p in ("a", "b", "c")]
    breaks, seg_values = voltage_segments(trains, 24.0, phase="a")
    assert breaks[0] == 0.0
    assert breaks[-1] == trains[0].duration
    assert seg_values.size == breaks.size - 1

    waves = [sample(tr, 1e6) for tr in trains]
    u_a, _, _ = phase_voltages(waves[0].values, waves[1].values, waves[2].values, 24.0)
    t = waves[0].times
    idx = np.clip(np.searchsorted(breaks, t, side="right") - 1, 0, seg_values.size - 1)
    assert np.array_equal(seg_values[idx], u_a)


def test_voltage_segments_needs_three_trains():
    records = [rec(1, 0.0, 0.004, 0.5, 0.25)]
    train = pulse_train(records, "a")
    with pytest.raises(ValueError):
        voltage_segments([train, train], 24.0)
