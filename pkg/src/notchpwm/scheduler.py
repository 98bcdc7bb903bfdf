"""Switching-cycle schedulers: conventional, randomized, and notch-locking.

Every pulse contributes two complex exponentials to the pulse-train
transform at a frequency f, one per edge.  The notch-locking ("selective
noise suppression", SNS) strategies construct consecutive cycles so that
one edge of the new pulse lands, at the target frequency fx, an integer
number of carrier periods of fx after an edge of the previous pulse.  The
paired exponentials then cancel and the transform at fx telescopes down to
the two unpaired boundary terms, no matter how long the run is.

Two pairings are available (`CancelMethod`):

* FALL_AFTER_RISE - the new cycle's falling edge locks to the previous
  cycle's rising edge; the recursion needs only the new cycle's duty.
* RISE_AFTER_FALL - the new cycle's rising edge locks to the previous
  cycle's falling edge; the recursion needs the previous cycle's duty.

(The degenerate SAME_CYCLE pairing locks a pulse's own edges; it pins the
switching frequency to duty * fx / k and is kept only so the cancellation
predicate can be exercised, never as a schedulable strategy.)

Strategies:

* CSVPWM - fixed frequency, center-aligned pulses.
* RP     - fixed frequency, uniformly random pulse position.
* RF     - random frequency in a band, center-aligned pulses.
* SNS_RP - fixed frequency; pulse position solves the lock each cycle
  with a uniformly drawn integer k from the admissible range.
* SNS_RF_RP - randomized frequency and position, locked each cycle.
  Either the position is drawn and the new frequency solves the lock
  (FREQ_FROM_POSITION, phase A acting as the reference that fixes the
  shared clock) or the frequency is drawn and each phase's position
  solves the lock (POSITION_FROM_FREQ).
* FIXED_POS - pulses pinned to front/center/back of their cycle; the
  shared switching frequency follows the closed-form lock of the
  reference phase A.  The other two legs generally cannot satisfy the
  lock as well, which is the classic weakness of fixed-position locking
  in three-phase bridges.

All randomness flows through `SeededRng`; a run is a pure function of
(strategy, modulator config, duration, seed).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .modulator import (
    DutyTriple,
    ModulatorConfig,
    angle_at,
    duty_cycles,
    sector_of,
)

PHASES = ("a", "b", "c")

# absolute slop allowed before a computed position/frequency is treated as
# a bug rather than roundoff
_BOUND_TOL = 1e-9


class ConfigError(ValueError):
    """Inconsistent or incomplete strategy/scenario configuration."""


class InfeasibleError(RuntimeError):
    """No integer k satisfies the position (or band) constraints."""


class OutOfBandError(RuntimeError):
    """A computed position or frequency violates its admissible range."""


class StrategyKind(Enum):
    CSVPWM = "csvpwm"
    RP = "rp"
    RF = "rf"
    SNS_RP = "sns_rp"
    SNS_RF_RP = "sns_rf_rp"
    FIXED_POS = "fixed_pos"


class CancelMethod(Enum):
    """Which edge pair is phase-locked at the notch frequency."""

    SAME_CYCLE = "same_cycle"
    FALL_AFTER_RISE = "fall_after_rise"
    RISE_AFTER_FALL = "rise_after_fall"


class SnsRfRpVariant(Enum):
    FREQ_FROM_POSITION = "freq_from_position"
    POSITION_FROM_FREQ = "position_from_freq"


class PulsePosition(Enum):
    FRONT = "front"
    CENTER = "center"
    BACK = "back"


class SeededRng:
    """Deterministic scalar RNG for schedule generation.

    Thin wrapper over the stdlib Mersenne Twister.  Identical seed and
    draw order reproduce identical sequences on any platform.  Degenerate
    intervals return their endpoint without consuming a draw, so two runs
    that differ only in a collapsed random range stay draw-aligned.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = random.Random(self.seed)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform real on [lo, hi]."""
        if hi <= lo:
            return lo
        return self._rng.uniform(lo, hi)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer on {lo, ..., hi} (inclusive)."""
        if hi <= lo:
            return lo
        return self._rng.randint(lo, hi)


@dataclass(frozen=True)
class StrategySpec:
    """Parameters selecting and configuring one scheduling strategy.

    fs is the fixed switching frequency (CSVPWM/RP/SNS_RP); banded kinds
    (RF/SNS_RF_RP/FIXED_POS) use [fs_min, fs_max] instead.  fx is the
    notch target.  With reference_phase_only=True the SNS recursion is
    applied to phase A only and the other legs fall back to plain random
    positions.
    """

    kind: StrategyKind
    fs: Optional[float] = None
    fs_min: Optional[float] = None
    fs_max: Optional[float] = None
    fx: Optional[float] = None
    sns_rp_variant: CancelMethod = CancelMethod.FALL_AFTER_RISE
    sns_rf_rp_variant: SnsRfRpVariant = SnsRfRpVariant.POSITION_FROM_FREQ
    fixed_position: PulsePosition = PulsePosition.CENTER
    cancel_method: CancelMethod = CancelMethod.FALL_AFTER_RISE
    reference_phase_only: bool = False

    def validate(self) -> None:
        kind = self.kind
        if kind in (StrategyKind.CSVPWM, StrategyKind.RP, StrategyKind.SNS_RP):
            if self.fs is None or self.fs <= 0.0:
                raise ConfigError(f"{kind.value} requires a positive fixed fs")
        if kind in (StrategyKind.RF, StrategyKind.SNS_RF_RP, StrategyKind.FIXED_POS):
            if self.fs_min is None or self.fs_max is None:
                raise ConfigError(f"{kind.value} requires fs_min and fs_max")
            if not 0.0 < self.fs_min <= self.fs_max:
                raise ConfigError(
                    f"need 0 < fs_min <= fs_max, got [{self.fs_min}, {self.fs_max}]"
                )
        if kind in (StrategyKind.SNS_RP, StrategyKind.SNS_RF_RP, StrategyKind.FIXED_POS):
            if self.fx is None or self.fx <= 0.0:
                raise ConfigError(f"{kind.value} requires a positive notch frequency fx")
        if kind is StrategyKind.SNS_RP and self.sns_rp_variant is CancelMethod.SAME_CYCLE:
            raise ConfigError(
                "same-cycle locking pins fs to duty*fx/k and is not schedulable"
            )
        if kind is StrategyKind.FIXED_POS and self.cancel_method is CancelMethod.SAME_CYCLE:
            raise ConfigError(
                "same-cycle locking pins fs to duty*fx/k and is not schedulable"
            )


@dataclass(frozen=True)
class CycleRecord:
    """One switching cycle: timing, duties, pulse positions, lock bookkeeping.

    position is the pulse start as a fraction of the cycle, in
    [0, 1 - duty] per phase.  k_used holds the lock integer when the
    phase's position/frequency came from a notch recursion, None
    otherwise.  fallback flags phases whose lock was infeasible this
    cycle and that got a plain random draw instead.
    """

    m: int
    t_m: float
    ts: float
    sector: int
    duty: tuple[float, float, float]
    position: tuple[float, float, float]
    k_used: tuple[Optional[int], Optional[int], Optional[int]]
    fallback: tuple[bool, bool, bool]


@dataclass
class RunStats:
    cycles: int = 0
    fallbacks: list[int] = field(default_factory=lambda: [0, 0, 0])
    chain_restarts: list[int] = field(default_factory=lambda: [0, 0, 0])
    feasibility_warnings: list[str] = field(default_factory=list)

    @property
    def total_fallbacks(self) -> int:
        return sum(self.fallbacks)

    @property
    def total_chain_restarts(self) -> int:
        return sum(self.chain_restarts)


@dataclass
class ScheduleResult:
    records: list[CycleRecord]
    stats: RunStats


# ---------------------------------------------------------------------------
# single-step operations


def next_csvpwm(duty_next: Sequence[float]) -> tuple[float, float, float]:
    """Center-aligned positions R = (1 - D) / 2 per phase."""
    d_a, d_b, d_c = duty_next
    return ((1.0 - d_a) / 2.0, (1.0 - d_b) / 2.0, (1.0 - d_c) / 2.0)


def next_rp(duty_next: Sequence[float], rng: SeededRng) -> tuple[float, float, float]:
    """Positions drawn uniformly from [0, 1 - D], independently per phase."""
    return tuple(rng.uniform(0.0, 1.0 - d) for d in duty_next)  # type: ignore[return-value]


def next_rf(fs_min: float, fs_max: float, rng: SeededRng) -> float:
    """Switching frequency drawn uniformly from [fs_min, fs_max]."""
    return rng.uniform(fs_min, fs_max)


def k_range_sns_rp(
    fx: float,
    fs: float,
    r_prev: float,
    d_next: float,
    variant: CancelMethod = CancelMethod.FALL_AFTER_RISE,
    d_prev: Optional[float] = None,
) -> Optional[tuple[int, int]]:
    """Admissible lock integers at constant switching frequency.

    Returns (k_min, k_max) such that every k in the range keeps the next
    pulse position inside [0, 1 - d_next], or None when the range is
    empty.  The RISE_AFTER_FALL pairing additionally needs the previous
    cycle's duty.
    """
    ratio = fx / fs
    if variant is CancelMethod.FALL_AFTER_RISE:
        k_min = math.ceil(ratio * (1.0 - r_prev + d_next))
        k_max = math.floor(ratio * (2.0 - r_prev))
    elif variant is CancelMethod.RISE_AFTER_FALL:
        if d_prev is None:
            raise ValueError("RISE_AFTER_FALL pairing needs d_prev")
        k_min = math.ceil(ratio * (1.0 - r_prev - d_prev))
        k_max = math.floor(ratio * (2.0 - r_prev - d_prev - d_next))
    else:
        raise ValueError(f"no cross-cycle k range for {variant}")
    if k_min > k_max:
        return None
    return k_min, k_max


def sns_rp_position(
    fx: float,
    fs: float,
    r_prev: float,
    d_prev: float,
    d_next: float,
    variant: CancelMethod,
    k: int,
) -> float:
    """Next pulse position that realizes the lock for a given integer k."""
    if variant is CancelMethod.FALL_AFTER_RISE:
        return (k / fx) * fs + r_prev - d_next - 1.0
    if variant is CancelMethod.RISE_AFTER_FALL:
        return (k / fx) * fs + r_prev + d_prev - 1.0
    raise ValueError(f"no cross-cycle position recursion for {variant}")


def _checked_position(r: float, d_next: float, context: str) -> float:
    hi = 1.0 - d_next
    if r < 0.0:
        if r >= -_BOUND_TOL:
            return 0.0
        raise OutOfBandError(f"{context}: position {r} below 0")
    if r > hi:
        if r <= hi + _BOUND_TOL:
            return hi
        raise OutOfBandError(f"{context}: position {r} above {hi}")
    return r


def next_position_sns_rp(
    fx: float,
    fs: float,
    r_prev: float,
    d_prev: float,
    d_next: float,
    variant: CancelMethod,
    rng: SeededRng,
) -> tuple[float, int]:
    """Draw k uniformly from the admissible range and place the next pulse.

    Raises InfeasibleError when no integer k exists.
    """
    kr = k_range_sns_rp(fx, fs, r_prev, d_next, variant=variant, d_prev=d_prev)
    if kr is None:
        raise InfeasibleError(
            f"no lock integer for fx={fx}, fs={fs}, r_prev={r_prev}, d_next={d_next}"
        )
    k = rng.randint(*kr)
    r = sns_rp_position(fx, fs, r_prev, d_prev, d_next, variant, k)
    return _checked_position(r, d_next, "sns_rp"), k


def feasibility_min_fx(
    variant: CancelMethod, fs: float, d_min: float, d_max: float
) -> float:
    """Lowest notch frequency for which a lock integer can exist at all.

    A necessary lower limit over the duty range [d_min, d_max]; below it
    the k range is empty for every reachable state, above it feasibility
    still depends on the actual positions and duties.
    """
    if variant is CancelMethod.RISE_AFTER_FALL:
        return fs / (2.0 - d_min)
    if variant is CancelMethod.FALL_AFTER_RISE:
        return fs / (2.0 + d_max)
    raise ValueError(f"no feasibility limit for {variant}")


def k_range_sns_rf_rp_freq(
    fx: float,
    fs_prev: float,
    r_prev: float,
    r_next: float,
    d_next: float,
    fs_min: float,
    fs_max: float,
) -> Optional[tuple[int, int]]:
    """Lock integers whose solved next frequency stays inside the band.

    FREQ_FROM_POSITION direction: the next position is already drawn and
    the next switching frequency will be solved from it.
    """
    k_min = math.ceil(fx * ((r_next + d_next) / fs_max - r_prev / fs_prev + 1.0 / fs_prev))
    k_max = math.floor(fx * ((r_next + d_next) / fs_min - r_prev / fs_prev + 1.0 / fs_prev))
    if k_min > k_max:
        return None
    return k_min, k_max


def next_freq_sns_rf_rp(
    fx: float,
    fs_prev: float,
    r_prev: float,
    r_next: float,
    d_next: float,
    k: int,
    fs_min: Optional[float] = None,
    fs_max: Optional[float] = None,
) -> float:
    """Next switching frequency that realizes the lock for a given k.

    When band limits are passed the result is validated against them
    (violations beyond roundoff indicate a k-range bug and raise
    OutOfBandError).
    """
    denom = k / fx + r_prev / fs_prev - 1.0 / fs_prev
    fs_next = (r_next + d_next) / denom
    if fs_min is not None and fs_next < fs_min:
        if fs_next >= fs_min * (1.0 - _BOUND_TOL):
            return fs_min
        raise OutOfBandError(f"solved fs {fs_next} below band [{fs_min}, {fs_max}]")
    if fs_max is not None and fs_next > fs_max:
        if fs_next <= fs_max * (1.0 + _BOUND_TOL):
            return fs_max
        raise OutOfBandError(f"solved fs {fs_next} above band [{fs_min}, {fs_max}]")
    return fs_next


def k_range_sns_rf_rp_pos(
    fx: float,
    fs_prev: float,
    fs_next: float,
    r_prev: float,
    d_next: float,
) -> Optional[tuple[int, int]]:
    """Lock integers whose solved next position stays inside [0, 1 - d_next].

    POSITION_FROM_FREQ direction: the next switching frequency is already
    drawn and the next position will be solved from it.
    """
    k_min = math.ceil(fx * (d_next / fs_next - r_prev / fs_prev + 1.0 / fs_prev))
    k_max = math.floor(fx * (1.0 / fs_next - r_prev / fs_prev + 1.0 / fs_prev))
    if k_min > k_max:
        return None
    return k_min, k_max


def next_position_sns_rf_rp(
    fx: float,
    fs_prev: float,
    fs_next: float,
    r_prev: float,
    d_next: float,
    k: int,
) -> float:
    """Next pulse position that realizes the lock across a frequency change.

    With fs_next == fs_prev this reduces exactly to the constant-frequency
    FALL_AFTER_RISE recursion.
    """
    ratio = fs_next / fs_prev
    r = (k / fx) * fs_next + ratio * r_prev - d_next - ratio
    return _checked_position(r, d_next, "sns_rf_rp")


# ---------------------------------------------------------------------------
# fixed-position frequency laws

# Each (method, position) pair reduces to fs_next = N / (a*k - C) with the
# coefficients below; a*k - C > 0 on the admissible branch, so fs_next is
# strictly decreasing in k and the in-band k set is an integer interval.


def _fixed_pos_coeffs(
    position: PulsePosition,
    method: CancelMethod,
    fx: float,
    fs_prev: float,
    d_prev: float,
    d_next: float,
) -> tuple[float, float, int]:
    if method is CancelMethod.SAME_CYCLE:
        # a pulse's own edges are duty * ts apart regardless of position
        return d_next * fx, 0.0, 1
    if method is CancelMethod.FALL_AFTER_RISE:
        if position is PulsePosition.FRONT:
            return fx * d_next, fx / fs_prev, 1
        if position is PulsePosition.CENTER:
            return fx * (1.0 + d_next), (1.0 + d_prev) * fx / fs_prev, 2
        return fx, d_prev * fx / fs_prev, 1
    # RISE_AFTER_FALL: only the center position couples consecutive cycles;
    # at front and back the locked edge gap spans exactly one cycle, so the
    # law collapses to the per-cycle rule fs = fx * (1 - duty) / k
    if position is PulsePosition.CENTER:
        return fx * (1.0 - d_next), (1.0 - d_prev) * fx / fs_prev, 2
    return fx * (1.0 - d_next), 0.0, 1


def fixed_position_next_freq(
    position: PulsePosition,
    method: CancelMethod,
    fx: float,
    fs_prev: float,
    d_prev: float,
    d_next: float,
    k: int,
) -> float:
    """Closed-form next switching frequency for fixed-position locking."""
    n, c, a = _fixed_pos_coeffs(position, method, fx, fs_prev, d_prev, d_next)
    return n / (a * k - c)


def fixed_position_k_range(
    position: PulsePosition,
    method: CancelMethod,
    fx: float,
    fs_prev: float,
    d_prev: float,
    d_next: float,
    fs_min: float,
    fs_max: float,
) -> Optional[tuple[int, int]]:
    """Lock integers whose fixed-position law lands inside the band."""
    n, c, a = _fixed_pos_coeffs(position, method, fx, fs_prev, d_prev, d_next)
    if n <= 0.0:
        return None
    k_min = math.ceil((c + n / fs_max) / a)
    k_max = math.floor((c + n / fs_min) / a)
    if k_min > k_max:
        return None
    return k_min, k_max


# ---------------------------------------------------------------------------
# full-run scheduler


def schedule(
    strategy: StrategySpec,
    modcfg: ModulatorConfig,
    duration: float,
    seed: int,
) -> ScheduleResult:
    """Generate the switching cycles covering [0, duration).

    Cycle m+1 starts exactly where cycle m ends; the last cycle may run
    past `duration`.  Draw order per cycle is fixed (banded frequency
    draw first, then phases a, b, c), so a run is fully determined by
    the arguments.  Per phase, a zero-duty cycle emits no pulse and the
    lock chain restarts at the next pulse (counted in chain_restarts);
    an empty k range falls back to a plain uniform position or frequency
    draw for that cycle (counted in fallbacks).
    """
    strategy.validate()
    stats = RunStats()
    kind = strategy.kind

    if kind is StrategyKind.SNS_RP:
        limit = feasibility_min_fx(
            strategy.sns_rp_variant, strategy.fs, 0.0, modcfg.m_index
        )
        if strategy.fx < limit:
            stats.feasibility_warnings.append(
                f"fx={strategy.fx:g} Hz is below the feasibility limit "
                f"{limit:g} Hz for fs={strategy.fs:g} Hz; every cycle will fall back"
            )

    rng = SeededRng(seed)
    records: list[CycleRecord] = []

    chain_r = [0.0, 0.0, 0.0]
    chain_d = [0.0, 0.0, 0.0]
    chain_alive = [False, False, False]
    gap_seen = [False, False, False]
    fs_prev: Optional[float] = None

    sns_phases = (0,) if strategy.reference_phase_only else (0, 1, 2)

    t = 0.0
    m = 0
    while t < duration:
        m += 1
        theta = angle_at(modcfg, t)
        sec = sector_of(theta)
        duty = duty_cycles(modcfg, theta)
        pos = [0.0, 0.0, 0.0]
        kk: list[Optional[int]] = [None, None, None]
        fb = [False, False, False]

        # --- switching frequency of this cycle ---
        if kind in (StrategyKind.CSVPWM, StrategyKind.RP, StrategyKind.SNS_RP):
            fs_next = strategy.fs
        elif kind is StrategyKind.RF or (
            kind is StrategyKind.SNS_RF_RP
            and strategy.sns_rf_rp_variant is SnsRfRpVariant.POSITION_FROM_FREQ
        ):
            fs_next = next_rf(strategy.fs_min, strategy.fs_max, rng)
        elif kind is StrategyKind.SNS_RF_RP:
            # FREQ_FROM_POSITION: phase A is the reference that sets the clock
            d_a = duty[0]
            if chain_alive[0] and d_a > 0.0 and 0 in sns_phases:
                r_a = rng.uniform(0.0, 1.0 - d_a)
                kr = k_range_sns_rf_rp_freq(
                    strategy.fx, fs_prev, chain_r[0], r_a, d_a,
                    strategy.fs_min, strategy.fs_max,
                )
                if kr is not None:
                    k_a = rng.randint(*kr)
                    fs_next = next_freq_sns_rf_rp(
                        strategy.fx, fs_prev, chain_r[0], r_a, d_a, k_a,
                        strategy.fs_min, strategy.fs_max,
                    )
                    kk[0] = k_a
                else:
                    fs_next = next_rf(strategy.fs_min, strategy.fs_max, rng)
                    fb[0] = True
                    stats.fallbacks[0] += 1
                pos[0] = r_a
            else:
                if d_a > 0.0:
                    pos[0] = rng.uniform(0.0, 1.0 - d_a)
                    if gap_seen[0]:
                        stats.chain_restarts[0] += 1
                        gap_seen[0] = False
                else:
                    pos[0] = 0.5
                fs_next = next_rf(strategy.fs_min, strategy.fs_max, rng)
        else:  # FIXED_POS: reference phase A drives the frequency law
            d_a = duty[0]
            if chain_alive[0] and d_a > 0.0 and chain_d[0] > 0.0:
                kr = fixed_position_k_range(
                    strategy.fixed_position, strategy.cancel_method,
                    strategy.fx, fs_prev, chain_d[0], d_a,
                    strategy.fs_min, strategy.fs_max,
                )
                if kr is not None:
                    k_a = rng.randint(*kr)
                    fs_next = fixed_position_next_freq(
                        strategy.fixed_position, strategy.cancel_method,
                        strategy.fx, fs_prev, chain_d[0], d_a, k_a,
                    )
                    if not strategy.fs_min * (1.0 - _BOUND_TOL) <= fs_next <= strategy.fs_max * (1.0 + _BOUND_TOL):
                        raise OutOfBandError(
                            f"fixed-position law left the band: fs={fs_next}"
                        )
                    fs_next = min(max(fs_next, strategy.fs_min), strategy.fs_max)
                    kk[0] = k_a
                else:
                    fs_next = next_rf(strategy.fs_min, strategy.fs_max, rng)
                    fb[0] = True
                    stats.fallbacks[0] += 1
            else:
                if d_a > 0.0 and gap_seen[0]:
                    stats.chain_restarts[0] += 1
                    gap_seen[0] = False
                fs_next = next_rf(strategy.fs_min, strategy.fs_max, rng)

        # --- pulse positions of this cycle ---
        if kind is StrategyKind.CSVPWM or kind is StrategyKind.RF:
            pos = list(next_csvpwm(duty))
        elif kind is StrategyKind.RP:
            pos = list(next_rp(duty, rng))
        elif kind is StrategyKind.FIXED_POS:
            for i in range(3):
                pos[i] = _fixed_position_value(strategy.fixed_position, duty[i])
        elif kind is StrategyKind.SNS_RP:
            for i in range(3):
                d = duty[i]
                if d <= 0.0:
                    pos[i] = 0.5
                    continue
                if i not in sns_phases:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    continue
                if not chain_alive[i]:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    if gap_seen[i]:
                        stats.chain_restarts[i] += 1
                        gap_seen[i] = False
                    continue
                kr = k_range_sns_rp(
                    strategy.fx, strategy.fs, chain_r[i], d,
                    variant=strategy.sns_rp_variant, d_prev=chain_d[i],
                )
                if kr is None:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    fb[i] = True
                    stats.fallbacks[i] += 1
                else:
                    k = rng.randint(*kr)
                    pos[i] = _checked_position(
                        sns_rp_position(
                            strategy.fx, strategy.fs, chain_r[i], chain_d[i], d,
                            strategy.sns_rp_variant, k,
                        ),
                        d,
                        "sns_rp",
                    )
                    kk[i] = k
        else:  # SNS_RF_RP
            from_freq = (
                strategy.sns_rf_rp_variant is SnsRfRpVariant.POSITION_FROM_FREQ
            )
            for i in range(3):
                if i == 0 and not from_freq:
                    continue  # reference phase already placed above
                d = duty[i]
                if d <= 0.0:
                    pos[i] = 0.5
                    continue
                if i not in sns_phases:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    continue
                if not chain_alive[i]:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    if gap_seen[i]:
                        stats.chain_restarts[i] += 1
                        gap_seen[i] = False
                    continue
                kr = k_range_sns_rf_rp_pos(
                    strategy.fx, fs_prev, fs_next, chain_r[i], d
                )
                if kr is None:
                    pos[i] = rng.uniform(0.0, 1.0 - d)
                    fb[i] = True
                    stats.fallbacks[i] += 1
                else:
                    k = rng.randint(*kr)
                    pos[i] = next_position_sns_rf_rp(
                        strategy.fx, fs_prev, fs_next, chain_r[i], d, k
                    )
                    kk[i] = k

        ts = 1.0 / fs_next
        records.append(
            CycleRecord(
                m=m,
                t_m=t,
                ts=ts,
                sector=sec,
                duty=(duty[0], duty[1], duty[2]),
                position=(pos[0], pos[1], pos[2]),
                k_used=(kk[0], kk[1], kk[2]),
                fallback=(fb[0], fb[1], fb[2]),
            )
        )

        for i in range(3):
            if duty[i] > 0.0:
                chain_r[i] = pos[i]
                chain_d[i] = duty[i]
                chain_alive[i] = True
            else:
                chain_alive[i] = False
                gap_seen[i] = True
        fs_prev = fs_next
        t = t + ts

    stats.cycles = m
    return ScheduleResult(records=records, stats=stats)


def _fixed_position_value(position: PulsePosition, d: float) -> float:
    if position is PulsePosition.FRONT:
        return 0.0
    if position is PulsePosition.CENTER:
        return (1.0 - d) / 2.0
    return 1.0 - d
