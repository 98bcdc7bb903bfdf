"""Spectral analysis: exact pulse-train transforms and estimated PSDs.

A train of unit rectangular pulses with rising edges at times b_m and
falling edges at times a_m has the continuous-time Fourier transform

    X(f) = (sum_m exp(-j 2 pi f b_m) - sum_m exp(-j 2 pi f a_m)) / (j 2 pi f)

so each pulse contributes one complex exponential per edge.  The notch
schedulers force consecutive-cycle edge exponentials at the target
frequency to cancel pairwise; `cancellation_residual` measures the
magnitude of the surviving edge sum, which telescopes to at most 2 for an
unbroken locked chain regardless of its length.

Estimated spectra use Welch's method on uniformly sampled waveforms.
Power densities are reported in dB/Hz with a -200 dB/Hz floor so that
exact zeros stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import signal

from .scheduler import CycleRecord, RunStats
from .synthesis import SampledWaveform, _phase_index

# minimum power kept when converting to dB; 10*log10 of it is -200 dB/Hz
_POWER_FLOOR = 1e-20

# a notch bin must beat the baseline by at least this much to count
# toward the notch width
NOTCH_THRESHOLD_DB = 6.0

_FREQ_CHUNK = 256


class GridMismatchError(ValueError):
    """Two spectra do not share one frequency grid."""


class TooShortError(ValueError):
    """Waveform too short for the requested Welch segmentation."""


@dataclass(frozen=True)
class Spectrum:
    """One-sided power spectral density in dB/Hz on a uniform grid."""

    freqs: np.ndarray
    values: np.ndarray
    mode: str
    resolution: float
    window: Optional[str] = None
    segment_len: Optional[int] = None
    overlap: Optional[float] = None


def power_to_db(power: np.ndarray) -> np.ndarray:
    """Convert linear power density to dB/Hz with the module floor."""
    return 10.0 * np.log10(np.maximum(np.asarray(power, dtype=float), _POWER_FLOOR))


def edge_times(
    records: Sequence[CycleRecord], phase: str
) -> tuple[np.ndarray, np.ndarray]:
    """Rising and falling edge instants of one phase, skipping empty cycles."""
    p = _phase_index(phase)
    rises = []
    falls = []
    for rec in records:
        d = rec.duty[p]
        if d <= 0.0:
            continue
        r = rec.position[p]
        rises.append(rec.t_m + r * rec.ts)
        falls.append(rec.t_m + (r + d) * rec.ts)
    return np.asarray(rises, dtype=float), np.asarray(falls, dtype=float)


def analytic_transform(
    records: Sequence[CycleRecord], phase: str, freqs: np.ndarray
) -> np.ndarray:
    """Exact Fourier transform of one phase's pulse train on a grid.

    freqs must be nonzero (the transform has a 1/f pole carrying the DC
    content).  Work is chunked over frequency to bound memory.
    """
    freqs = np.asarray(freqs, dtype=float)
    if np.any(freqs == 0.0):
        raise ValueError("analytic transform is undefined at f = 0")
    rises, falls = edge_times(records, phase)
    out = np.zeros(freqs.shape, dtype=complex)
    if rises.size == 0:
        return out
    for lo in range(0, freqs.size, _FREQ_CHUNK):
        f = freqs[lo : lo + _FREQ_CHUNK, None]
        s_rise = np.exp(-2j * np.pi * f * rises[None, :]).sum(axis=1)
        s_fall = np.exp(-2j * np.pi * f * falls[None, :]).sum(axis=1)
        out[lo : lo + _FREQ_CHUNK] = (s_rise - s_fall) / (
            2j * np.pi * freqs[lo : lo + _FREQ_CHUNK]
        )
    return out


def cancellation_residual(
    records: Sequence[CycleRecord], phase: str, fx: float
) -> float:
    """Magnitude of the edge exponential sum at fx.

    This is |2 pi fx X(fx)|: the pulse count drops out, leaving only the
    unpaired boundary edges of each locked run, so an unbroken chain is
    bounded by 2 while unlocked schedules grow like sqrt(cycle count).
    """
    rises, falls = edge_times(records, phase)
    if rises.size == 0:
        return 0.0
    s_rise = np.exp(-2j * np.pi * fx * rises).sum()
    s_fall = np.exp(-2j * np.pi * fx * falls).sum()
    return float(abs(s_rise - s_fall))


def analytic_psd(
    records: Sequence[CycleRecord], phase: str, freqs: np.ndarray
) -> Spectrum:
    """One-sided PSD in dB/Hz implied by the exact transform.

    Uses |X(f)|^2 * 2 / T on the given grid, T being the schedule span,
    which matches a one-sided periodogram density of the same waveform.
    """
    freqs = np.asarray(freqs, dtype=float)
    x = analytic_transform(records, phase, freqs)
    duration = records[-1].t_m + records[-1].ts if records else 0.0
    if duration <= 0.0:
        raise ValueError("empty schedule has no spectrum")
    power = (np.abs(x) ** 2) * 2.0 / duration
    res = float(freqs[1] - freqs[0]) if freqs.size > 1 else 0.0
    return Spectrum(
        freqs=freqs, values=power_to_db(power), mode="analytic", resolution=res
    )


def welch_psd(
    waveform: SampledWaveform,
    segment_len: int,
    overlap: float = 0.5,
    window: str = "hann",
    detrend="constant",
) -> Spectrum:
    """Welch PSD estimate of a sampled waveform, in dB/Hz.

    segment_len must be a power of two no longer than the waveform;
    overlap is the fraction of a segment shared with its neighbor.
    """
    n = waveform.values.size
    if segment_len < 2 or segment_len & (segment_len - 1):
        raise ValueError(f"segment_len must be a power of two, got {segment_len}")
    if segment_len > n:
        raise TooShortError(
            f"waveform has {n} samples, fewer than segment_len {segment_len}"
        )
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap fraction must be in [0, 1), got {overlap}")
    noverlap = int(overlap * segment_len)
    freqs, power = signal.welch(
        waveform.values,
        fs=waveform.rate,
        window=window,
        nperseg=segment_len,
        noverlap=noverlap,
        detrend=detrend,
        return_onesided=True,
        scaling="density",
    )
    return Spectrum(
        freqs=freqs,
        values=power_to_db(power),
        mode="welch",
        resolution=float(freqs[1] - freqs[0]),
        window=window,
        segment_len=segment_len,
        overlap=overlap,
    )


@dataclass(frozen=True)
class NotchReport:
    """Suppression achieved around the target frequency, test vs baseline.

    Fallback and chain-restart counts are copied from the test run's
    statistics when provided, so a report records how clean the
    cancellation chains behind it were.
    """

    fx: float
    half_band: float
    max_reduction_db: float
    mean_reduction_db: float
    notch_width_hz: float
    threshold_db: float = NOTCH_THRESHOLD_DB
    fallbacks: int = 0
    chain_restarts: int = 0


def notch_report(
    test: Spectrum,
    baseline: Spectrum,
    fx: float,
    half_band: float,
    stats: Optional[RunStats] = None,
) -> NotchReport:
    """Quantify the notch at fx in `test` relative to `baseline`.

    reduction(f) = baseline_dB(f) - test_dB(f).  Max and mean are taken
    over |f - fx| <= half_band; the width is the extent of the contiguous
    run of bins with reduction >= NOTCH_THRESHOLD_DB that contains the
    bin nearest fx (zero when that bin itself does not qualify).
    """
    if test.freqs.shape != baseline.freqs.shape or not np.array_equal(
        test.freqs, baseline.freqs
    ):
        raise GridMismatchError("test and baseline spectra use different grids")
    freqs = test.freqs
    reduction = baseline.values - test.values

    band = np.abs(freqs - fx) <= half_band
    if not np.any(band):
        raise ValueError(f"no grid bins within {half_band} Hz of {fx} Hz")
    max_red = float(np.max(reduction[band]))
    mean_red = float(np.mean(reduction[band]))

    center = int(np.argmin(np.abs(freqs - fx)))
    width = 0.0
    if reduction[center] >= NOTCH_THRESHOLD_DB:
        lo = center
        while lo > 0 and reduction[lo - 1] >= NOTCH_THRESHOLD_DB:
            lo -= 1
        hi = center
        while hi + 1 < reduction.size and reduction[hi + 1] >= NOTCH_THRESHOLD_DB:
            hi += 1
        width = (hi - lo + 1) * test.resolution

    return NotchReport(
        fx=fx,
        half_band=half_band,
        max_reduction_db=max_red,
        mean_reduction_db=mean_red,
        notch_width_hz=width,
        fallbacks=stats.total_fallbacks if stats is not None else 0,
        chain_restarts=stats.total_chain_restarts if stats is not None else 0,
    )


def band_flatness(spectrum: Spectrum, f_lo: float, f_hi: float) -> tuple[float, float]:
    """(std_db, peak_to_mean_db) of the PSD over [f_lo, f_hi]."""
    mask = (spectrum.freqs >= f_lo) & (spectrum.freqs <= f_hi)
    if not np.any(mask):
        raise ValueError(f"no grid bins in [{f_lo}, {f_hi}] Hz")
    vals = spectrum.values[mask]
    return float(np.std(vals)), float(np.max(vals) - np.mean(vals))


def rfft_grid(segment_len: int, rate: float) -> np.ndarray:
    """Positive one-sided FFT frequencies for a segment (DC bin dropped)."""
    return np.fft.rfftfreq(segment_len, d=1.0 / rate)[1:]
