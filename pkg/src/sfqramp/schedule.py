"""SFQ pulse schedules: ramps, trains, clock snapping, and spectra.

A schedule is an on-ramp of up to six kicks inside R qubit periods, a train
of n_train kicks spaced exactly one period apart, and an off-ramp that is the
time-mirror of the on-ramp. Only the on-ramp is ever stored. Total duration
is D = (2R + n_train - 1) T, which makes the complete kick multiset symmetric
under t -> D - t.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "MAX_RAMP_PULSES",
    "ClockGrid",
    "Discarded",
    "Ramp",
    "Schedule",
    "absolute_kick_times",
    "ramp_tick_indices",
    "schedule_spectrum",
    "snap_to_clock",
    "total_duration",
]

MAX_RAMP_PULSES = 6

COUPLINGS = ("inductive", "capacitive")

# Relative tolerance (in ticks) below which a pulse counts as already on-grid.
_ON_TICK_EPS = 1e-9


@dataclass(frozen=True)
class Ramp:
    """On-ramp pulse times (ns) within a window of r_periods qubit periods."""

    r_periods: int
    times: tuple[float, ...]

    def __post_init__(self):
        if self.r_periods < 1:
            raise ValueError("ramp length must be at least one qubit period")
        times = tuple(float(t) for t in self.times)
        if len(times) > MAX_RAMP_PULSES:
            raise ValueError(f"at most {MAX_RAMP_PULSES} kicks allowed within a ramp")
        if any(t < 0 for t in times):
            raise ValueError("ramp pulse times must be non-negative")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("ramp pulse times must be sorted ascending")
        object.__setattr__(self, "times", times)

    @property
    def n_pulses(self) -> int:
        return len(self.times)

    def validate_window(self, period: float) -> None:
        if self.times and self.times[-1] >= self.r_periods * period:
            raise ValueError("ramp pulse times must lie inside [0, R*T)")


@dataclass(frozen=True)
class Schedule:
    """Full gate schedule; the off-ramp is implied by mirror symmetry."""

    ramp: Ramp
    n_train: int
    coupling: str
    theta_kick: float

    def __post_init__(self):
        if self.n_train < 0:
            raise ValueError("n_train must be non-negative")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}")
        if self.theta_kick <= 0:
            raise ValueError("theta_kick must be positive")


@dataclass(frozen=True)
class ClockGrid:
    """SFQ clock as an integer multiple of the qubit frequency."""

    multiple: int
    tick: float

    def __post_init__(self):
        if self.multiple < 1:
            raise ValueError("clock multiple must be a positive integer")
        if self.tick <= 0:
            raise ValueError("tick duration must be positive")

    @classmethod
    def from_period(cls, multiple: int, period: float) -> "ClockGrid":
        return cls(multiple=multiple, tick=period / multiple)

    @property
    def period(self) -> float:
        return self.tick * self.multiple


@dataclass(frozen=True)
class Discarded:
    """Outcome of a snap that violates the clock-degeneracy rule."""

    reason: str


def total_duration(s: Schedule, period: float) -> float:
    """Gate duration D in ns; always an integer multiple of the period."""
    if s.n_train == 0:
        return 2.0 * s.ramp.r_periods * period
    return (2.0 * s.ramp.r_periods + s.n_train - 1.0) * period


def absolute_kick_times(s: Schedule, period: float) -> np.ndarray:
    """All kick times of the mirrored schedule, sorted ascending.

    On-ramp kicks keep their stored times, train kicks sit at R*T + k*T, and
    each off-ramp kick mirrors an on-ramp kick at D - t. Exact duplicates are
    rejected; they would stack two kicks on one clock edge.
    """
    s.ramp.validate_window(period)
    duration = total_duration(s, period)
    on = list(s.ramp.times)
    train = [(s.ramp.r_periods + k) * period for k in range(s.n_train)]
    off = [duration - t for t in s.ramp.times]
    kicks = np.sort(np.array(on + train + off, dtype=float))
    if kicks.size > 1 and np.min(np.diff(kicks)) == 0.0:
        raise ValueError("schedule contains zero-gap duplicate kicks")
    return kicks


def ramp_tick_indices(ramp: Ramp, grid: ClockGrid) -> list[int]:
    """Integer tick index of each ramp pulse; rejects off-grid ramps."""
    indices = []
    for t in ramp.times:
        k = round(t / grid.tick)
        if abs(t - k * grid.tick) > _ON_TICK_EPS * grid.tick:
            raise ValueError(f"pulse at {t} ns is not on the {grid.multiple}x clock grid")
        indices.append(int(k))
    return indices


def snap_to_clock(ramp: Ramp, grid: ClockGrid) -> Union[Ramp, Discarded]:
    """Snap continuous ramp pulses onto clock ticks.

    Each pulse may move to its floor or ceiling tick. Among all assignments
    with pairwise-distinct ticks the one minimizing the total displacement is
    chosen (ties break toward earlier ticks). A ramp with more than two
    pulses strictly inside one tick interval is discarded, as is a ramp with
    no collision-free assignment.
    """
    tick = grid.tick
    n_ticks = ramp.r_periods * grid.multiple
    fractional = [t / tick for t in ramp.times]

    interval_load: dict[int, int] = {}
    candidates: list[tuple[int, ...]] = []
    for x in fractional:
        nearest = round(x)
        if abs(x - nearest) <= _ON_TICK_EPS:
            # Already on a tick (modulo roundoff); boundary tick folds back in.
            candidates.append((min(int(nearest), n_ticks - 1),))
            continue
        lo = int(np.floor(x))
        hi = lo + 1
        interval_load[lo] = interval_load.get(lo, 0) + 1
        if interval_load[lo] > 2:
            return Discarded(
                f"more than two pulses between clock ticks {lo} and {hi}"
            )
        options = tuple(k for k in (lo, hi) if 0 <= k <= n_ticks - 1)
        candidates.append(options)

    best_key: tuple[float, tuple[int, ...]] | None = None
    for assignment in itertools.product(*candidates):
        if len(set(assignment)) != len(assignment):
            continue
        gap = sum(abs(k - x) for k, x in zip(assignment, fractional))
        key = (gap, assignment)
        if best_key is None or key < best_key:
            best_key = key
    if best_key is None:
        return Discarded("no collision-free tick assignment exists")

    snapped = tuple(sorted(k * tick for k in best_key[1]))
    return Ramp(r_periods=ramp.r_periods, times=snapped)


def schedule_spectrum(s: Schedule, period: float, omega: float) -> complex:
    """Dirac-comb Fourier amplitude of the kick times at angular frequency omega."""
    kicks = absolute_kick_times(s, period)
    return complex(np.sum(np.exp(1j * omega * kicks)))
