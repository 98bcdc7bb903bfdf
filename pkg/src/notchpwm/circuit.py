"""Series RL load response to piecewise-constant phase voltage.

Between switching events the phase voltage U is constant, so the current
obeys L di/dt + R i = U exactly and each segment advances by

    i(t0 + h) = U / R + (i(t0) - U / R) * exp(-h / tau),   tau = L / R.

Chaining this over the segment list gives the current without any
integration error; optional uniform resampling evaluates the same closed
form inside each segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class LoadParams:
    """Series resistance-inductance load on one phase."""

    resistance: float
    inductance: float
    initial_current: float = 0.0

    def __post_init__(self) -> None:
        if self.resistance <= 0.0:
            raise ValueError(f"resistance must be positive, got {self.resistance}")
        if self.inductance <= 0.0:
            raise ValueError(f"inductance must be positive, got {self.inductance}")

    @property
    def tau(self) -> float:
        return self.inductance / self.resistance


@dataclass(frozen=True)
class CurrentTrace:
    """Current samples i(times[k]) through the load."""

    times: np.ndarray
    values: np.ndarray


def rl_current(
    times: np.ndarray,
    voltages: np.ndarray,
    load: LoadParams,
    sample_rate: Optional[float] = None,
) -> CurrentTrace:
    """Exact RL current for a piecewise-constant voltage.

    times holds the M + 1 segment boundaries, voltages the M segment
    values.  With sample_rate None the trace is returned at the segment
    boundaries; otherwise on the uniform grid k / sample_rate covering
    [times[0], times[-1]).
    """
    times = np.asarray(times, dtype=float)
    voltages = np.asarray(voltages, dtype=float)
    if times.ndim != 1 or voltages.ndim != 1 or times.size != voltages.size + 1:
        raise ValueError(
            f"need len(times) == len(voltages) + 1, got {times.size} and {voltages.size}"
        )
    if np.any(np.diff(times) < 0.0):
        raise ValueError("segment boundaries must be nondecreasing")

    tau = load.tau
    steady = voltages / load.resistance
    spans = np.diff(times)
    decay = np.exp(-spans / tau)

    # current at every segment boundary
    knots = np.empty(times.size)
    knots[0] = load.initial_current
    i = load.initial_current
    for j in range(voltages.size):
        i = steady[j] + (i - steady[j]) * decay[j]
        knots[j + 1] = i

    if sample_rate is None:
        return CurrentTrace(times=times, values=knots)

    if sample_rate <= 0.0:
        raise ValueError(f"sample rate must be positive, got {sample_rate}")
    t0, t1 = times[0], times[-1]
    first = int(np.ceil(t0 * sample_rate - 1e-12))
    n = int((t1 - t0) * sample_rate)
    t = (first + np.arange(n)) / sample_rate
    t = t[t < t1]
    seg = np.clip(np.searchsorted(times, t, side="right") - 1, 0, voltages.size - 1)
    vals = steady[seg] + (knots[seg] - steady[seg]) * np.exp(-(t - times[seg]) / tau)
    return CurrentTrace(times=t, values=vals)
