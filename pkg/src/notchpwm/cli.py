"""Scenario runner: schedule, synthesize, analyze, and export artifacts.

Subcommands:

* simulate  - run one strategy, write cycles.csv, waveform.csv, psd.csv,
  current.csv, and report.txt into the output directory.  When a notch
  frequency is configured, the report also scores the notch against an
  internally run random-position baseline with the same seed.
* compare   - run the configured strategy plus a chosen baseline kind on
  a common PSD grid; psd.csv carries both columns.
* flatness  - run one strategy and score PSD flatness in +-200 Hz
  windows centered on the first four switching-frequency multiples.

Configs are flat `key = value` text files ('#' starts a comment).
Unknown or duplicate keys are rejected: every run is fully determined by
the config file and the seed, and re-running writes byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np

from .circuit import CurrentTrace, LoadParams, rl_current
from .modulator import ModulatorConfig
from .scheduler import (
    CancelMethod,
    ConfigError,
    CycleRecord,
    PulsePosition,
    ScheduleResult,
    SnsRfRpVariant,
    StrategyKind,
    StrategySpec,
    schedule,
)
from .spectrum import (
    NotchReport,
    Spectrum,
    TooShortError,
    band_flatness,
    notch_report,
    welch_psd,
)
from .synthesis import (
    PulseTrain,
    SampledWaveform,
    line_voltage,
    pulse_train,
    sample,
    voltage_segments,
)

FLATNESS_HALF_WINDOW_HZ = 200.0
FLATNESS_MULTIPLES = 4

# runs shorter than this many fundamental periods give noisy PSDs
MIN_FUNDAMENTAL_PERIODS = 50.0


@dataclass
class ScenarioConfig:
    """Everything a run needs, as read from one config file."""

    strategy: StrategyKind
    m_index: float
    f1_hz: float
    u_dc_v: float
    duration_s: float
    seed: int
    fs_hz: Optional[float] = None
    fs_min_hz: Optional[float] = None
    fs_max_hz: Optional[float] = None
    fx_hz: Optional[float] = None
    half_band_hz: float = 500.0
    sns_rp_variant: CancelMethod = CancelMethod.FALL_AFTER_RISE
    sns_rf_rp_variant: SnsRfRpVariant = SnsRfRpVariant.POSITION_FROM_FREQ
    fixed_position: PulsePosition = PulsePosition.CENTER
    cancel_method: CancelMethod = CancelMethod.FALL_AFTER_RISE
    reference_phase_only: bool = False
    sample_rate_hz: float = 1e6
    psd_segment_len: int = 65536
    psd_overlap: float = 0.5
    psd_window: str = "hann"
    load_r_ohm: float = 1.02
    load_l_h: float = 0.00059
    out_dir: str = "out"
    export_window_s: float = 0.1


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_enum(enum_cls):
    def convert(text: str):
        try:
            return enum_cls(text.lower())
        except ValueError:
            choices = ", ".join(e.value for e in enum_cls)
            raise ValueError(f"expected one of {choices}, got {text!r}") from None

    return convert


_CONVERTERS = {
    "strategy": _parse_enum(StrategyKind),
    "m_index": float,
    "f1_hz": float,
    "u_dc_v": float,
    "duration_s": float,
    "seed": int,
    "fs_hz": float,
    "fs_min_hz": float,
    "fs_max_hz": float,
    "fx_hz": float,
    "half_band_hz": float,
    "sns_rp_variant": _parse_enum(CancelMethod),
    "sns_rf_rp_variant": _parse_enum(SnsRfRpVariant),
    "fixed_position": _parse_enum(PulsePosition),
    "cancel_method": _parse_enum(CancelMethod),
    "reference_phase_only": _parse_bool,
    "sample_rate_hz": float,
    "psd_segment_len": int,
    "psd_overlap": float,
    "psd_window": str,
    "load_r_ohm": float,
    "load_l_h": float,
    "out_dir": str,
    "export_window_s": float,
}

_REQUIRED = ("strategy", "m_index", "f1_hz", "u_dc_v", "duration_s", "seed")


def parse_config(path) -> ScenarioConfig:
    """Read a flat key = value config file into a ScenarioConfig.

    Raises ConfigError for unreadable files, unknown or duplicate keys,
    unparsable values, missing required keys, or inconsistent values.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    seen: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            seen[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc

    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")

    cfg = ScenarioConfig(**seen)  # type: ignore[arg-type]
    _validate_scenario(cfg)
    return cfg


def _validate_scenario(cfg: ScenarioConfig) -> None:
    if cfg.duration_s <= 0.0:
        raise ConfigError(f"duration_s must be positive, got {cfg.duration_s}")
    if cfg.seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {cfg.seed}")
    if cfg.sample_rate_hz <= 0.0:
        raise ConfigError(f"sample_rate_hz must be positive, got {cfg.sample_rate_hz}")
    if cfg.half_band_hz <= 0.0:
        raise ConfigError(f"half_band_hz must be positive, got {cfg.half_band_hz}")
    if not 0.0 <= cfg.psd_overlap < 1.0:
        raise ConfigError(f"psd_overlap must be in [0, 1), got {cfg.psd_overlap}")
    if cfg.export_window_s <= 0.0:
        raise ConfigError(
            f"export_window_s must be positive, got {cfg.export_window_s}"
        )
    strategy_spec(cfg).validate()
    modulator_config(cfg)


def strategy_spec(cfg: ScenarioConfig) -> StrategySpec:
    return StrategySpec(
        kind=cfg.strategy,
        fs=cfg.fs_hz,
        fs_min=cfg.fs_min_hz,
        fs_max=cfg.fs_max_hz,
        fx=cfg.fx_hz,
        sns_rp_variant=cfg.sns_rp_variant,
        sns_rf_rp_variant=cfg.sns_rf_rp_variant,
        fixed_position=cfg.fixed_position,
        cancel_method=cfg.cancel_method,
        reference_phase_only=cfg.reference_phase_only,
    )


def modulator_config(cfg: ScenarioConfig) -> ModulatorConfig:
    try:
        return ModulatorConfig(
            m_index=cfg.m_index, f1=cfg.f1_hz, u_dc=cfg.u_dc_v
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def baseline_spec(cfg: ScenarioConfig, kind: str) -> StrategySpec:
    """Baseline strategy inheriting the shared parameters of the config."""
    if kind in ("rp", "csvpwm"):
        fs = cfg.fs_hz
        if fs is None:
            if cfg.fs_min_hz is None or cfg.fs_max_hz is None:
                raise ConfigError(f"baseline {kind!r} needs fs_hz or a band")
            fs = 0.5 * (cfg.fs_min_hz + cfg.fs_max_hz)
        return StrategySpec(
            kind=StrategyKind.RP if kind == "rp" else StrategyKind.CSVPWM, fs=fs
        )
    if kind == "rf":
        if cfg.fs_min_hz is None or cfg.fs_max_hz is None:
            raise ConfigError("baseline 'rf' needs fs_min_hz and fs_max_hz")
        return StrategySpec(
            kind=StrategyKind.RF, fs_min=cfg.fs_min_hz, fs_max=cfg.fs_max_hz
        )
    raise ConfigError(f"unknown baseline kind {kind!r}")


@dataclass
class RunArtifacts:
    """In-memory results of one strategy run."""

    result: ScheduleResult
    trains: tuple[PulseTrain, PulseTrain, PulseTrain]
    samples: tuple[SampledWaveform, SampledWaveform, SampledWaveform]
    u_ab: SampledWaveform
    psd: Spectrum


def run_strategy(
    spec: StrategySpec, modcfg: ModulatorConfig, cfg: ScenarioConfig
) -> RunArtifacts:
    """Schedule, synthesize, sample, and estimate the line-voltage PSD."""
    result = schedule(spec, modcfg, cfg.duration_s, cfg.seed)
    trains = tuple(pulse_train(result.records, p) for p in ("a", "b", "c"))
    waves = tuple(sample(tr, cfg.sample_rate_hz) for tr in trains)
    u_ab = SampledWaveform(
        values=line_voltage(waves[0].values, waves[1].values, cfg.u_dc_v),
        rate=cfg.sample_rate_hz,
    )
    try:
        psd = welch_psd(u_ab, cfg.psd_segment_len, cfg.psd_overlap, cfg.psd_window)
    except TooShortError as exc:
        raise ConfigError(str(exc)) from exc
    return RunArtifacts(
        result=result, trains=trains, samples=waves, u_ab=u_ab, psd=psd
    )


def _run_warnings(cfg: ScenarioConfig, artifacts: RunArtifacts) -> list[str]:
    warnings = list(artifacts.result.stats.feasibility_warnings)
    periods = cfg.duration_s * cfg.f1_hz
    if periods < MIN_FUNDAMENTAL_PERIODS:
        warnings.append(
            f"duration_s covers {periods:g} fundamental periods; "
            f"PSD variance benefits from at least {MIN_FUNDAMENTAL_PERIODS:g}"
        )
    return warnings


# ---------------------------------------------------------------------------
# artifact writers (deterministic bytes: repr floats, LF newlines, no clocks)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open_out(path: Path) -> TextIO:
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="\n")


def write_cycles_csv(path: Path, records: Sequence[CycleRecord]) -> None:
    with _open_out(path) as fh:
        fh.write("# notchpwm cycles v1\n")
        fh.write(
            "m,t_m_s,ts_s,sector,d_a,d_b,d_c,r_a,r_b,r_c,"
            "k_a,k_b,k_c,fallback_a,fallback_b,fallback_c\n"
        )
        for rec in records:
            cells = [
                str(rec.m),
                repr(rec.t_m),
                repr(rec.ts),
                str(rec.sector),
                *(repr(d) for d in rec.duty),
                *(repr(r) for r in rec.position),
                *("" if k is None else str(k) for k in rec.k_used),
                *("1" if f else "0" for f in rec.fallback),
            ]
            fh.write(",".join(cells) + "\n")


def write_psd_csv(path: Path, psd: Spectrum, baseline: Optional[Spectrum] = None) -> None:
    with _open_out(path) as fh:
        fh.write("# notchpwm psd v1\n")
        if baseline is None:
            fh.write("freq_hz,psd_db_hz\n")
            for f, v in zip(psd.freqs, psd.values):
                fh.write(f"{repr(float(f))},{repr(float(v))}\n")
        else:
            fh.write("freq_hz,psd_db_hz,psd_baseline_db_hz\n")
            for f, v, b in zip(psd.freqs, psd.values, baseline.values):
                fh.write(f"{repr(float(f))},{repr(float(v))},{repr(float(b))}\n")


def write_waveform_csv(
    path: Path, artifacts: RunArtifacts, cfg: ScenarioConfig
) -> None:
    n = min(
        int(round(cfg.export_window_s * cfg.sample_rate_hz)),
        artifacts.u_ab.values.size,
    )
    t = np.arange(n) / cfg.sample_rate_hz
    xa, xb, xc = (w.values[:n] for w in artifacts.samples)
    uab = artifacts.u_ab.values[:n]
    with _open_out(path) as fh:
        fh.write("# notchpwm waveform v1\n")
        fh.write("time_s,x_a,x_b,x_c,u_ab_v\n")
        for k in range(n):
            fh.write(
                f"{repr(float(t[k]))},{_fmt(float(xa[k]))},{_fmt(float(xb[k]))},"
                f"{_fmt(float(xc[k]))},{repr(float(uab[k]))}\n"
            )


def write_current_csv(path: Path, trace: CurrentTrace) -> None:
    with _open_out(path) as fh:
        fh.write("# notchpwm current v1\n")
        fh.write("time_s,i_a_amps\n")
        for t, i in zip(trace.times, trace.values):
            fh.write(f"{repr(float(t))},{repr(float(i))}\n")


def write_report(path: Path, entries: Sequence[tuple[str, object]]) -> None:
    with _open_out(path) as fh:
        fh.write("# notchpwm report v1\n")
        for key, value in entries:
            fh.write(f"{key} = {_fmt(value)}\n")


def _report_entries(
    cfg: ScenarioConfig,
    artifacts: RunArtifacts,
    warnings: Sequence[str],
    report: Optional[NotchReport],
    baseline_name: Optional[str],
) -> list[tuple[str, object]]:
    stats = artifacts.result.stats
    entries: list[tuple[str, object]] = [
        ("strategy", cfg.strategy.value),
        ("seed", cfg.seed),
        ("duration_s", cfg.duration_s),
        ("cycles", stats.cycles),
        ("fallbacks", stats.total_fallbacks),
        ("fallbacks_a", stats.fallbacks[0]),
        ("fallbacks_b", stats.fallbacks[1]),
        ("fallbacks_c", stats.fallbacks[2]),
        ("chain_restarts", stats.total_chain_restarts),
        ("chain_restarts_a", stats.chain_restarts[0]),
        ("chain_restarts_b", stats.chain_restarts[1]),
        ("chain_restarts_c", stats.chain_restarts[2]),
        ("feasibility_warnings", len(stats.feasibility_warnings)),
        ("warnings", len(warnings)),
    ]
    for idx, text in enumerate(warnings, start=1):
        entries.append((f"warning_{idx}", text))
    entries.append(("psd_resolution_hz", artifacts.psd.resolution))
    entries.append(("baseline", baseline_name))
    entries.append(("fx_hz", cfg.fx_hz))
    entries.append(("half_band_hz", cfg.half_band_hz if cfg.fx_hz else None))
    if report is not None:
        entries.extend(
            [
                ("max_reduction_db", report.max_reduction_db),
                ("mean_reduction_db", report.mean_reduction_db),
                ("notch_width_hz", report.notch_width_hz),
                ("notch_threshold_db", report.threshold_db),
            ]
        )
    else:
        entries.extend(
            [
                ("max_reduction_db", None),
                ("mean_reduction_db", None),
                ("notch_width_hz", None),
                ("notch_threshold_db", None),
            ]
        )
    return entries


def _phase_a_current(
    artifacts: RunArtifacts, cfg: ScenarioConfig
) -> CurrentTrace:
    breaks, volts = voltage_segments(artifacts.trains, cfg.u_dc_v, "a")
    # truncate the segment list at the export window, closing the last
    # partial segment exactly at the window edge
    t_end = min(cfg.export_window_s, float(breaks[-1]))
    keep = int(np.searchsorted(breaks, t_end, side="left"))
    clipped = np.append(breaks[:keep], t_end)
    load = LoadParams(resistance=cfg.load_r_ohm, inductance=cfg.load_l_h)
    return rl_current(
        clipped, volts[: clipped.size - 1], load, sample_rate=cfg.sample_rate_hz
    )


def run_simulate(cfg: ScenarioConfig) -> Optional[NotchReport]:
    """Run the configured strategy and write the full artifact set.

    With a notch frequency configured, an RP baseline with the same seed
    is run internally to score the notch in report.txt; psd.csv carries
    the strategy's own PSD only.
    """
    out = Path(cfg.out_dir)
    modcfg = modulator_config(cfg)
    artifacts = run_strategy(strategy_spec(cfg), modcfg, cfg)
    warnings = _run_warnings(cfg, artifacts)
    for text in warnings:
        print(f"warning: {text}", file=sys.stderr)

    report = None
    baseline_name = None
    if cfg.fx_hz is not None:
        baseline_name = "rp"
        base = run_strategy(baseline_spec(cfg, "rp"), modcfg, cfg)
        report = notch_report(
            artifacts.psd,
            base.psd,
            cfg.fx_hz,
            cfg.half_band_hz,
            stats=artifacts.result.stats,
        )

    write_cycles_csv(out / "cycles.csv", artifacts.result.records)
    write_psd_csv(out / "psd.csv", artifacts.psd)
    write_waveform_csv(out / "waveform.csv", artifacts, cfg)
    write_current_csv(out / "current.csv", _phase_a_current(artifacts, cfg))
    write_report(
        out / "report.txt",
        _report_entries(cfg, artifacts, warnings, report, baseline_name),
    )
    return report


def run_compare(cfg: ScenarioConfig, baseline_kind: str = "rp") -> NotchReport:
    """Run strategy and baseline on a common grid; write the overlay PSD."""
    if cfg.fx_hz is None:
        raise ConfigError("compare requires fx_hz")
    out = Path(cfg.out_dir)
    modcfg = modulator_config(cfg)
    artifacts = run_strategy(strategy_spec(cfg), modcfg, cfg)
    base = run_strategy(baseline_spec(cfg, baseline_kind), modcfg, cfg)
    warnings = _run_warnings(cfg, artifacts)
    for text in warnings:
        print(f"warning: {text}", file=sys.stderr)

    report = notch_report(
        artifacts.psd,
        base.psd,
        cfg.fx_hz,
        cfg.half_band_hz,
        stats=artifacts.result.stats,
    )
    write_cycles_csv(out / "cycles.csv", artifacts.result.records)
    write_psd_csv(out / "psd.csv", artifacts.psd, baseline=base.psd)
    write_report(
        out / "report.txt",
        _report_entries(cfg, artifacts, warnings, report, baseline_kind),
    )
    return report


def run_flatness(cfg: ScenarioConfig) -> list[tuple[float, float, float]]:
    """Score PSD flatness around switching-frequency multiples.

    Windows are center +- 200 Hz at c * f_center for c = 1..4, f_center
    being the fixed switching frequency or the band midpoint.  Returns
    and writes (center_hz, std_db, peak_to_mean_db) per window.
    """
    out = Path(cfg.out_dir)
    modcfg = modulator_config(cfg)
    artifacts = run_strategy(strategy_spec(cfg), modcfg, cfg)
    warnings = _run_warnings(cfg, artifacts)
    for text in warnings:
        print(f"warning: {text}", file=sys.stderr)

    if cfg.fs_hz is not None:
        f_center = cfg.fs_hz
    else:
        f_center = 0.5 * (cfg.fs_min_hz + cfg.fs_max_hz)

    rows: list[tuple[float, float, float]] = []
    for c in range(1, FLATNESS_MULTIPLES + 1):
        center = c * f_center
        std_db, peak_to_mean = band_flatness(
            artifacts.psd,
            center - FLATNESS_HALF_WINDOW_HZ,
            center + FLATNESS_HALF_WINDOW_HZ,
        )
        rows.append((center, std_db, peak_to_mean))

    with _open_out(out / "flatness.csv") as fh:
        fh.write("# notchpwm flatness v1\n")
        fh.write("center_hz,std_db,peak_to_mean_db\n")
        for center, std_db, ptm in rows:
            fh.write(f"{repr(center)},{repr(std_db)},{repr(ptm)}\n")
    write_report(
        out / "report.txt",
        _report_entries(cfg, artifacts, warnings, None, None),
    )
    return rows


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="notchpwm",
        description="Pulse scheduling and spectral-notch analysis for "
        "two-level three-phase PWM",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one strategy and export all artifacts"),
        ("compare", "overlay the strategy PSD against a baseline"),
        ("flatness", "score PSD flatness near switching-frequency multiples"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to key=value config")
        p.add_argument("--out", help="output directory override")
        p.add_argument("--seed", type=int, help="seed override")
        if name == "compare":
            p.add_argument(
                "--baseline",
                choices=("rp", "csvpwm", "rf"),
                default="rp",
                help="baseline strategy kind",
            )
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
        if args.out is not None:
            cfg.out_dir = args.out
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError(f"seed must be nonnegative, got {args.seed}")
            cfg.seed = args.seed
        if args.command == "simulate":
            run_simulate(cfg)
        elif args.command == "compare":
            run_compare(cfg, args.baseline)
        else:
            run_flatness(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
