"""Tests for config parsing, artifact writing, and the command line."""

import filecmp

import pytest

from notchpwm import CancelMethod, ConfigError, StrategyKind
from notchpwm.cli import (
    baseline_spec,
    main,
    parse_config,
    run_compare,
    run_flatness,
    run_simulate,
)

ARTIFACTS = ("cycles.csv", "psd.csv", "waveform.csv", "current.csv", "report.txt")


def write_config(path, drop=(), **overrides):
    base = {
        "strategy": "rp",
        "m_index": 0.7,
        "f1_hz": 50.0,
        "u_dc_v": 24.0,
        "duration_s": 0.04,
        "seed": 1,
        "fs_hz": 2500.0,
        "psd_segment_len": 4096,
        "export_window_s": 0.01,
    }
    base.update(overrides)
    lines = [f"{k} = {v}" for k, v in base.items() if k not in drop]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_report(path):
    out = {}
    for line in path.read_text().splitlines()[1:]:
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# config parsing


def test_parse_config_types_and_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# scenario\n"
        "strategy = sns_rp   # locked positions\n"
        "m_index = 0.7\n"
        "f1_hz = 50\n"
        "u_dc_v = 24\n"
        "duration_s = 0.04\n"
        "seed = 3\n"
        "fs_hz = 2500\n"
        "fx_hz = 7000\n"
        "\n"
        "sns_rp_variant = rise_after_fall\n"
        "reference_phase_only = yes\n"
        "psd_segment_len = 4096\n"
    )
    cfg = parse_config(path)
    assert cfg.strategy is StrategyKind.SNS_RP
    assert cfg.sns_rp_variant is CancelMethod.RISE_AFTER_FALL
    assert cfg.reference_phase_only is True
    assert cfg.seed == 3
    assert cfg.psd_segment_len == 4096
    assert cfg.fx_hz == 7000.0
    assert cfg.out_dir == "out"  # default preserved


@pytest.mark.parametrize(
    "mutate",
    [
        dict(strategy="quietest"),  # unknown enum value
        dict(m_index="lots"),  # unparsable float
        dict(duration_s=0.0),
        dict(seed=-1),
        dict(psd_overlap=1.0),
        dict(reference_phase_only="maybe"),
        dict(strategy="sns_rp"),  # missing fx_hz for a notch strategy
        dict(strategy="rf"),  # missing band
    ],
)
def test_parse_config_rejects_bad_values(tmp_path, mutate):
    path = write_config(tmp_path / "run.cfg", **mutate)
    with pytest.raises(ConfigError):
        parse_config(path)


def test_parse_config_structural_errors(tmp_path):
    path = tmp_path / "run.cfg"
    write_config(path)
    with open(path, "a") as fh:
        fh.write("volume = 11\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(path)

    write_config(path)
    with open(path, "a") as fh:
        fh.write("seed = 2\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(path)

    write_config(path, drop=("m_index",))
    with pytest.raises(ConfigError, match="missing required"):
        parse_config(path)

    path.write_text("just some words\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(path)

    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "absent.cfg")


def test_baseline_spec_band_midpoint(tmp_path):
    path = write_config(
        tmp_path / "run.cfg",
        strategy="sns_rf_rp",
        fx_hz=7000.0,
        fs_min_hz=1500.0,
        fs_max_hz=3500.0,
        drop=("fs_hz",),
    )
    cfg = parse_config(path)
    base = baseline_spec(cfg, "rp")
    assert base.kind is StrategyKind.RP
    assert base.fs == 2500.0
    rf = baseline_spec(cfg, "rf")
    assert (rf.fs_min, rf.fs_max) == (1500.0, 3500.0)
    with pytest.raises(ConfigError):
        baseline_spec(cfg, "spwm")


# ---------------------------------------------------------------------------
# run commands and artifacts


def test_simulate_writes_all_artifacts(tmp_path):
    path = write_config(tmp_path / "run.cfg", out_dir=tmp_path / "out")
    cfg = parse_config(path)
    report = run_simulate(cfg)
    assert report is None  # no notch frequency configured
    for name in ARTIFACTS:
        assert (tmp_path / "out" / name).is_file()
    cycles = (tmp_path / "out" / "cycles.csv").read_text().splitlines()
    assert cycles[0] == "# notchpwm cycles v1"
    assert cycles[1].startswith("m,t_m_s,ts_s,sector,")
    report_data = read_report(tmp_path / "out" / "report.txt")
    assert report_data["strategy"] == "rp"
    assert len(cycles) == 2 + int(report_data["cycles"])
    assert 100 <= int(report_data["cycles"]) <= 101  # 0.04 s at 2500 Hz
    assert report_data["max_reduction_db"] == ""


def test_simulate_reruns_byte_identical(tmp_path):
    path = write_config(tmp_path / "run.cfg")
    for sub in ("one", "two"):
        cfg = parse_config(path)
        cfg.out_dir = str(tmp_path / sub)
        run_simulate(cfg)
    for name in ARTIFACTS:
        assert filecmp.cmp(
            tmp_path / "one" / name, tmp_path / "two" / name, shallow=False
        ), name


def test_simulate_scores_notch_against_internal_baseline(tmp_path):
    path = write_config(
        tmp_path / "run.cfg",
        strategy="sns_rp",
        fx_hz=7000.0,
        out_dir=tmp_path / "out",
    )
    report = run_simulate(parse_config(path))
    assert report is not None
    data = read_report(tmp_path / "out" / "report.txt")
    assert data["baseline"] == "rp"
    assert data["fx_hz"] == "7000.0"
    assert float(data["max_reduction_db"]) == report.max_reduction_db
    assert data["notch_threshold_db"] == "6.0"


def test_compare_with_itself_reports_zero(tmp_path):
    path = write_config(
        tmp_path / "run.cfg", fx_hz=7000.0, out_dir=tmp_path / "out"
    )
    report = run_compare(parse_config(path), "rp")
    # the strategy is the baseline, run with the same seed
    assert report.max_reduction_db == 0.0
    assert report.mean_reduction_db == 0.0
    assert report.notch_width_hz == 0.0
    psd = (tmp_path / "out" / "psd.csv").read_text().splitlines()
    assert psd[1] == "freq_hz,psd_db_hz,psd_baseline_db_hz"


def test_compare_requires_fx(tmp_path):
    path = write_config(tmp_path / "run.cfg")
    with pytest.raises(ConfigError):
        run_compare(parse_config(path), "rp")


def test_flatness_windows(tmp_path):
    path = write_config(
        tmp_path / "run.cfg", strategy="csvpwm", out_dir=tmp_path / "out"
    )
    rows = run_flatness(parse_config(path))
    assert [r[0] for r in rows] == [2500.0, 5000.0, 7500.0, 10000.0]
    lines = (tmp_path / "out" / "flatness.csv").read_text().splitlines()
    assert lines[0] == "# notchpwm flatness v1"
    assert lines[1] == "center_hz,std_db,peak_to_mean_db"
    assert len(lines) == 2 + 4


def test_main_exit_codes_and_overrides(tmp_path):
    cfg_path = write_config(tmp_path / "run.cfg")
    out = tmp_path / "cli_out"
    code = main(
        ["simulate", "--config", str(cfg_path), "--out", str(out), "--seed", "9"]
    )
    assert code == 0
    data = read_report(out / "report.txt")
    assert data["seed"] == "9"

    bad = write_config(tmp_path / "bad.cfg", duration_s=-1.0)
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 2
    assert (
        main(["compare", "--config", str(cfg_path), "--out", str(out)]) == 2
    )  # no fx_hz


def test_main_compare_baseline_choice(tmp_path):
    cfg_path = write_config(
        tmp_path / "run.cfg",
        strategy="sns_rp",
        fx_hz=7000.0,
    )
    out = tmp_path / "cmp_out"
    code = main(
        [
            "compare",
            "--config",
            str(cfg_path),
            "--out",
            str(out),
            "--baseline",
            "csvpwm",
        ]
    )
    assert code == 0
    assert read_report(out / "report.txt")["baseline"] == "csvpwm"
