"""Deterministic PWM pulse scheduling with selective spectral notching.

Simulates two-level three-phase 5-segment space-vector modulation under
conventional, randomized, and notch-locking schedulers, synthesizes the
switch and voltage waveforms, and verifies in the spectrum that the
locked schedules null the pulse train at the chosen frequency.
"""

from .circuit import CurrentTrace, LoadParams, rl_current
from .modulator import (
    DutyTriple,
    ModulatorConfig,
    angle_at,
    duty_cycles,
    sector_of,
)
from .scheduler import (
    CancelMethod,
    ConfigError,
    CycleRecord,
    InfeasibleError,
    OutOfBandError,
    PulsePosition,
    RunStats,
    ScheduleResult,
    SeededRng,
    SnsRfRpVariant,
    StrategyKind,
    StrategySpec,
    feasibility_min_fx,
    fixed_position_k_range,
    fixed_position_next_freq,
    k_range_sns_rf_rp_freq,
    k_range_sns_rf_rp_pos,
    k_range_sns_rp,
    next_csvpwm,
    next_freq_sns_rf_rp,
    next_position_sns_rf_rp,
    next_position_sns_rp,
    next_rf,
    next_rp,
    schedule,
    sns_rp_position,
)
from .spectrum import (
    GridMismatchError,
    NotchReport,
    Spectrum,
    TooShortError,
    analytic_psd,
    analytic_transform,
    band_flatness,
    cancellation_residual,
    edge_times,
    notch_report,
    power_to_db,
    rfft_grid,
    welch_psd,
)
from .synthesis import (
    MalformedRecordsError,
    PulseTrain,
    RateTooLowError,
    SampledWaveform,
    line_voltage,
    phase_voltages,
    pulse_train,
    sample,
    voltage_segments,
)

__version__ = "0.1.0"

__all__ = [
    "CancelMethod",
    "ConfigError",
    "CurrentTrace",
    "CycleRecord",
    "DutyTriple",
    "GridMismatchError",
    "InfeasibleError",
    "LoadParams",
    "MalformedRecordsError",
    "ModulatorConfig",
    "NotchReport",
    "OutOfBandError",
    "PulsePosition",
    "PulseTrain",
    "RateTooLowError",
    "RunStats",
    "SampledWaveform",
    "ScheduleResult",
    "SeededRng",
    "SnsRfRpVariant",
    "Spectrum",
    "StrategyKind",
    "StrategySpec",
    "TooShortError",
    "analytic_psd",
    "analytic_transform",
    "angle_at",
    "band_flatness",
    "cancellation_residual",
    "edge_times",
    "duty_cycles",
    "feasibility_min_fx",
    "fixed_position_k_range",
    "fixed_position_next_freq",
    "k_range_sns_rf_rp_freq",
    "k_range_sns_rf_rp_pos",
    "k_range_sns_rp",
    "line_voltage",
    "next_csvpwm",
    "next_freq_sns_rf_rp",
    "next_position_sns_rf_rp",
    "next_position_sns_rp",
    "next_rf",
    "next_rp",
    "notch_report",
    "phase_voltages",
    "power_to_db",
    "pulse_train",
    "rfft_grid",
    "rl_current",
    "sample",
    "schedule",
    "sector_of",
    "sns_rp_position",
    "voltage_segments",
    "welch_psd",
]
