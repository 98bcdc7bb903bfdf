"""Per-phase duty laws for 5-segment (bus-clamped) space-vector PWM.

The voltage-vector plane splits into six 60-degree sectors.  In every
sector one inverter leg stays clamped low for the whole switching cycle,
so each duty triple has exactly one zero entry; the other two legs follow
sinusoidal laws of the absolute vector angle.  The clamped leg hops every
two sectors (C low in sectors 1-2, A in 3-4, B in 5-6), which makes the
duty triple cyclically permute under a 120-degree shift of the angle.

Duties are sampled once per switching cycle, at the cycle start, and held
constant over that cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi
SECTOR_SPAN = math.pi / 3.0


@dataclass(frozen=True)
class ModulatorConfig:
    """Operating point: modulation index, fundamental frequency, DC link.

    m_index is the commanded vector magnitude relative to its maximum and
    must lie in (0, 1] (no overmodulation).  f1 is the fundamental output
    frequency in Hz, u_dc the DC link voltage in volts.
    """

    m_index: float
    f1: float
    u_dc: float

    def __post_init__(self) -> None:
        if not 0.0 < self.m_index <= 1.0:
            raise ValueError(f"m_index must be in (0, 1], got {self.m_index}")
        if self.f1 <= 0.0:
            raise ValueError(f"f1 must be positive, got {self.f1}")
        if self.u_dc <= 0.0:
            raise ValueError(f"u_dc must be positive, got {self.u_dc}")


class DutyTriple(NamedTuple):
    d_a: float
    d_b: float
    d_c: float


def sector_of(theta: float) -> int:
    """Sector index in 1..6 for an angle already normalized to [0, 2*pi).

    Angles exactly on a sector boundary belong to the higher sector
    (theta = 0 is sector 1).  The rule is arbitrary but fixed, so runs
    reproduce bit for bit; the duty laws of adjacent sectors agree on the
    boundary anyway.
    """
    sector = int(theta // SECTOR_SPAN) + 1
    return 6 if sector > 6 else sector


def angle_at(cfg: ModulatorConfig, t: float) -> float:
    """Electrical angle 2*pi*f1*t wrapped to [0, 2*pi)."""
    return math.fmod(TWO_PI * cfg.f1 * t, TWO_PI)


def _clamp01(x: float) -> float:
    # sector-edge roundoff can leave values like -1e-17; the laws are
    # nonnegative inside their own sector, so snap into [0, 1]
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def _sector_duties(m: float, theta: float, sector: int) -> tuple[float, float, float]:
    """Raw (unclamped) duty laws of a given sector evaluated at theta.

    Exposed separately so boundary continuity between adjacent sector laws
    can be checked directly.
    """
    if sector <= 2:
        return m * math.sin(theta + SECTOR_SPAN), m * math.sin(theta), 0.0
    if sector <= 4:
        return 0.0, m * math.sin(theta - SECTOR_SPAN), -m * math.sin(theta + SECTOR_SPAN)
    return -m * math.sin(theta - SECTOR_SPAN), 0.0, -m * math.sin(theta)


def duty_cycles(cfg: ModulatorConfig, theta: float) -> DutyTriple:
    """Duty triple (d_a, d_b, d_c) at absolute vector angle theta.

    Exactly one component is zero (the clamped leg of the sector) and every
    component lies in [0, m_index].
    """
    d_a, d_b, d_c = _sector_duties(cfg.m_index, theta, sector_of(theta))
    return DutyTriple(_clamp01(d_a), _clamp01(d_b), _clamp01(d_c))
