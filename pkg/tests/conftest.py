"""Shared builders for the test suite.

Synthetic single-phase schedules exercising the lock recursions outside the
full scheduler, plus brute-force integer scans used as oracles for the
closed-form k ranges.
"""

from notchpwm import (
    CancelMethod,
    CycleRecord,
    SampledWaveform,
    SeededRng,
    SnsRfRpVariant,
    k_range_sns_rf_rp_freq,
    k_range_sns_rf_rp_pos,
    k_range_sns_rp,
    line_voltage,
    next_freq_sns_rf_rp,
    next_position_sns_rf_rp,
    next_position_sns_rp,
    pulse_train,
    sample,
    sns_rp_position,
    welch_psd,
)

K_SCAN = range(-100, 101)


def rec(m, t, ts, d, r):
    """Single-phase cycle record: phase a active, b and c idle."""
    return CycleRecord(
        m=m,
        t_m=t,
        ts=ts,
        sector=1,
        duty=(d, 0.0, 0.0),
        position=(r, 0.5, 0.5),
        k_used=(None, None, None),
        fallback=(False, False, False),
    )


def chain_sns_rp(variant, n, seed, fx=7000.0, fs=2500.0):
    """n-cycle locked chain at fixed switching frequency, never broken.

    Duties are redrawn until the lock range is nonempty, so every cycle
    extends the chain; positions then follow the lock recursion.
    """
    rng = SeededRng(seed)
    ts = 1.0 / fs
    d = rng.uniform(0.1, 0.9)
    r = rng.uniform(0.0, 1.0 - d)
    records = [rec(1, 0.0, ts, d, r)]
    t = ts
    for m in range(2, n + 1):
        while True:
            d_next = rng.uniform(0.1, 0.9)
            if k_range_sns_rp(fx, fs, r, d_next, variant=variant, d_prev=d) is not None:
                break
        r, _ = next_position_sns_rp(fx, fs, r, d, d_next, variant, rng)
        d = d_next
        records.append(rec(m, t, ts, d, r))
        t += ts
    return records


def chain_rf_rp(variant, n, seed, fx=7000.0, fs_min=1500.0, fs_max=3500.0):
    """n-cycle locked chain over a switching-frequency band, never broken."""
    rng = SeededRng(seed)
    fs = rng.uniform(fs_min, fs_max)
    d = rng.uniform(0.1, 0.9)
    r = rng.uniform(0.0, 1.0 - d)
    records = [rec(1, 0.0, 1.0 / fs, d, r)]
    t = 1.0 / fs
    for m in range(2, n + 1):
        if variant is SnsRfRpVariant.POSITION_FROM_FREQ:
            while True:
                fs_next = rng.uniform(fs_min, fs_max)
                d_next = rng.uniform(0.1, 0.9)
                kr = k_range_sns_rf_rp_pos(fx, fs, fs_next, r, d_next)
                if kr is not None:
                    break
            k = rng.randint(*kr)
            r = next_position_sns_rf_rp(fx, fs, fs_next, r, d_next, k)
        else:
            while True:
                d_next = rng.uniform(0.1, 0.9)
                r_next = rng.uniform(0.0, 1.0 - d_next)
                kr = k_range_sns_rf_rp_freq(fx, fs, r, r_next, d_next, fs_min, fs_max)
                if kr is not None:
                    break
            k = rng.randint(*kr)
            fs_next = next_freq_sns_rf_rp(fx, fs, r, r_next, d_next, k, fs_min, fs_max)
            r = r_next
        fs = fs_next
        d = d_next
        records.append(rec(m, t, 1.0 / fs, d, r))
        t += 1.0 / fs
    return records


def chain_rp(n, seed, ts=4e-4):
    """n-cycle random-position schedule (no locking) at fixed frequency."""
    rng = SeededRng(seed)
    records = []
    t = 0.0
    for m in range(1, n + 1):
        d = rng.uniform(0.1, 0.9)
        r = rng.uniform(0.0, 1.0 - d)
        records.append(rec(m, t, ts, d, r))
        t += ts
    return records


def brute_k_sns_rp(fx, fs, r_prev, d_next, variant=CancelMethod.FALL_AFTER_RISE, d_prev=0.0):
    """Integer scan oracle for the fixed-frequency lock range.

    The position recursion is linear and increasing in k, so the valid
    set is contiguous and (min, max) characterizes it.
    """
    valid = [
        k
        for k in K_SCAN
        if 0.0 <= sns_rp_position(fx, fs, r_prev, d_prev, d_next, variant, k) <= 1.0 - d_next
    ]
    return (valid[0], valid[-1]) if valid else None


def brute_k_freq(fx, fs_prev, r_prev, r_next, d_next, fs_min, fs_max):
    """Integer scan oracle for the frequency-direction lock range."""
    valid = []
    for k in K_SCAN:
        den = k / fx + r_prev / fs_prev - 1.0 / fs_prev
        if den == 0.0:
            continue
        fs_next = (r_next + d_next) / den
        if fs_min <= fs_next <= fs_max:
            valid.append(k)
    return (valid[0], valid[-1]) if valid else None


def brute_k_pos(fx, fs_prev, fs_next, r_prev, d_next):
    """Integer scan oracle for the position-direction lock range."""
    ratio = fs_next / fs_prev
    valid = [
        k
        for k in K_SCAN
        if 0.0 <= (k / fx) * fs_next + ratio * r_prev - d_next - ratio <= 1.0 - d_next
    ]
    return (valid[0], valid[-1]) if valid else None


def line_psd(records, u_dc, rate=1e6, segment_len=65536):
    """Welch PSD of the a-b line voltage synthesized from a schedule."""
    trains = [pulse_train(records, p) for p in ("a", "b")]
    x_a = sample(trains[0], rate)
    x_b = sample(trains[1], rate)
    n = min(x_a.values.size, x_b.values.size)
    u_ab = line_voltage(x_a.values[:n], x_b.values[:n], u_dc)
    return welch_psd(SampledWaveform(values=u_ab, rate=rate), segment_len)
