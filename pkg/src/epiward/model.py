"""Ten-compartment daily epidemic model.

The population is split into susceptible (S), home-quarantined (Q), latent (L),
infectious (I), recovered outside hospital (R), ward (H), ICU (U), deceased (F),
post-ICU ward (HU) and discharged (A) groups. One step advances all groups by
one day using per-day transition fractions; `simulate` iterates steps under a
`ParameterSchedule` that can override rates on day intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date, timedelta
from typing import Mapping, Sequence

import numpy as np

from . import engine
from .errors import (
    InvalidRatesError,
    InvalidStateError,
    ScheduleError,
    SimulationDayError,
    ZeroDenominatorError,
)

COMPARTMENTS = ("s", "q", "l", "i", "r", "h", "u", "f", "hu", "a")

# Column layout of the per-day rate matrix consumed by the simulation kernels.
RATE_FIELDS = (
    "beta",
    "s_q",
    "q_s",
    "i_l",
    "i_r",
    "i_h",
    "i_u",
    "h_u",
    "h_f",
    "h_a",
    "u_f",
    "u_hu",
    "hu_a",
)

# Source-compartment outflow groups whose per-day fractions must sum to <= 1.
_RATE_GROUPS = (
    ("i_r", "i_h", "i_u"),
    ("h_u", "h_f", "h_a"),
    ("u_f", "u_hu"),
)

_SUM_EPS = 1e-12


@dataclass(frozen=True)
class CompartmentState:
    """Person counts in the ten groups at one day. Counts are real-valued."""

    s: float
    q: float
    l: float
    i: float
    r: float
    h: float
    u: float
    f: float
    hu: float
    a: float
    day: int = 0

    def __post_init__(self):
        for name in COMPARTMENTS:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise InvalidStateError(
                    f"compartment {name!r} must be finite and >= 0, got {value}"
                )

    def total(self) -> float:
        return float(sum(getattr(self, name) for name in COMPARTMENTS))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in COMPARTMENTS], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float], day: int = 0) -> "CompartmentState":
        if len(values) != len(COMPARTMENTS):
            raise InvalidStateError(f"expected {len(COMPARTMENTS)} values, got {len(values)}")
        return cls(*(float(v) for v in values), day=day)


@dataclass(frozen=True)
class RateSet:
    """Transmission rate beta plus the twelve per-day transition fractions."""

    beta: float
    s_q: float = 0.0
    q_s: float = 0.0
    i_l: float = 0.0
    i_r: float = 0.0
    i_h: float = 0.0
    i_u: float = 0.0
    h_u: float = 0.0
    h_f: float = 0.0
    h_a: float = 0.0
    u_f: float = 0.0
    u_hu: float = 0.0
    hu_a: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0.0:
            raise InvalidRatesError(f"beta must be finite and >= 0, got {self.beta}")
        for name in RATE_FIELDS[1:]:
            value = getattr(self, name)
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise InvalidRatesError(f"rate {name!r} must lie in [0, 1], got {value}")
        for group in _RATE_GROUPS:
            total = sum(getattr(self, name) for name in group)
            if total > 1.0 + _SUM_EPS:
                raise InvalidRatesError(
                    f"outflow rates {'+'.join(group)} = {total} exceed 1"
                )

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in RATE_FIELDS], dtype=np.float64)

    def replace(self, **overrides: float) -> "RateSet":
        return replace(self, **overrides)

    def removal_rate(self) -> float:
        """Total per-day outflow fraction from the infectious group."""
        return self.i_r + self.i_h + self.i_u


@dataclass(frozen=True)
class PopulationConfig:
    """Total population, calendar anchor of day 0 and the day-0 state."""

    p_total: float
    start_date: date
    initial_state: CompartmentState

    def __post_init__(self):
        if not math.isfinite(self.p_total) or self.p_total <= 0.0:
            raise InvalidStateError(f"p_total must be > 0, got {self.p_total}")
        total = self.initial_state.total()
        if abs(total - self.p_total) > 1e-9 * max(1.0, self.p_total):
            raise InvalidStateError(
                f"initial state sums to {total}, expected p_total = {self.p_total}"
            )

    def date_of_day(self, day: int) -> date:
        return self.start_date + timedelta(days=day)


@dataclass(frozen=True)
class RateOverride:
    """Partial rate override active on days `day_from..day_to` (inclusive)."""

    day_from: int
    day_to: int
    rates: Mapping[str, float]

    def __post_init__(self):
        if self.day_from > self.day_to:
            raise ScheduleError(f"empty override interval {self.day_from}..{self.day_to}")
        unknown = set(self.rates) - set(RATE_FIELDS)
        if unknown:
            raise ScheduleError(f"unknown rate fields in override: {sorted(unknown)}")


@dataclass(frozen=True)
class ParameterSchedule:
    """Base rates plus ordered day-interval overrides; later overrides win."""

    base: RateSet
    overrides: tuple[RateOverride, ...] = ()

    def effective(self, day: int) -> RateSet:
        merged: dict[str, float] = {}
        for ov in self.overrides:
            if ov.day_from <= day <= ov.day_to:
                merged.update(ov.rates)
        return self.base.replace(**merged) if merged else self.base

    def rate_matrix(self, horizon_days: int) -> np.ndarray:
        """Effective (horizon_days, 13) rate matrix, one row per stepped day."""
        matrix = np.tile(self.base.as_array(), (horizon_days, 1))
        index = {name: col for col, name in enumerate(RATE_FIELDS)}
        for ov in self.overrides:
            lo = max(ov.day_from, 0)
            hi = min(ov.day_to, horizon_days - 1)
            for name, value in ov.rates.items():
                matrix[lo : hi + 1, index[name]] = value
        return matrix

    def validate(self, horizon_days: int) -> None:
        for ov in self.overrides:
            if ov.day_from < 0 or ov.day_to >= horizon_days:
                raise ScheduleError(
                    f"override {ov.day_from}..{ov.day_to} outside horizon 0..{horizon_days - 1}"
                )
        bad = first_invalid_rate_day(self.rate_matrix(horizon_days))
        if bad is not None:
            raise ScheduleError(f"effective rates invalid on day {bad[0]}: {bad[1]}")


def first_invalid_rate_day(matrix: np.ndarray) -> tuple[int, str] | None:
    """First day whose rate row violates the RateSet bounds, with a reason."""
    if matrix.shape[0] == 0:
        return None
    col = {name: i for i, name in enumerate(RATE_FIELDS)}
    if not np.all(np.isfinite(matrix)):
        day = int(np.argwhere(~np.isfinite(matrix).all(axis=1))[0, 0])
        return day, "non-finite rate"
    if np.any(matrix[:, 0] < 0.0):
        day = int(np.argmax(matrix[:, 0] < 0.0))
        return day, "beta < 0"
    frac = matrix[:, 1:]
    bad_rows = (frac < 0.0).any(axis=1) | (frac > 1.0).any(axis=1)
    if bad_rows.any():
        return int(np.argmax(bad_rows)), "transition rate outside [0, 1]"
    for group in _RATE_GROUPS:
        total = sum(matrix[:, col[name]] for name in group)
        over = total > 1.0 + _SUM_EPS
        if over.any():
            return int(np.argmax(over)), f"{'+'.join(group)} > 1"
    return None


@dataclass(frozen=True)
class QuarantineSchedule:
    """Day-indexed s_q/q_s values, usually derived from mobility data."""

    start_date: date
    s_q: np.ndarray
    q_s: np.ndarray

    def __post_init__(self):
        if len(self.s_q) != len(self.q_s):
            raise ScheduleError("s_q and q_s schedules must have equal length")

    def aligned(self, start: date, horizon_days: int) -> tuple[np.ndarray, np.ndarray]:
        """(s_q, q_s) arrays for days 0..horizon-1 of a simulation starting at
        `start`; days outside the schedule's coverage get 0."""
        s_q = np.zeros(horizon_days)
        q_s = np.zeros(horizon_days)
        offset = (self.start_date - start).days
        lo = max(0, offset)
        hi = min(horizon_days, offset + len(self.s_q))
        if lo < hi:
            s_q[lo:hi] = self.s_q[lo - offset : hi - offset]
            q_s[lo:hi] = self.q_s[lo - offset : hi - offset]
        return s_q, q_s


@dataclass(frozen=True)
class Trajectory:
    """Simulated states for days 0..T as a (T+1, 10) array."""

    array: np.ndarray

    def __post_init__(self):
        if self.array.ndim != 2 or self.array.shape[1] != len(COMPARTMENTS):
            raise InvalidStateError(f"trajectory array must be (T+1, 10), got {self.array.shape}")

    def __len__(self) -> int:
        return self.array.shape[0]

    @property
    def states(self) -> tuple[CompartmentState, ...]:
        return tuple(
            CompartmentState.from_array(row, day=day) for day, row in enumerate(self.array)
        )

    def series(self, name: str) -> np.ndarray:
        return self.array[:, COMPARTMENTS.index(name)]


def step(state: CompartmentState, rates: RateSet, p_total: float) -> CompartmentState:
    """Advance the population by one day.

    New infections are beta*S*I/P_T; every other flow is rate times its source
    compartment. The ten-group total is preserved exactly up to rounding.
    """
    if not math.isfinite(p_total) or p_total <= 0.0:
        raise InvalidStateError(f"p_total must be > 0, got {p_total}")
    s, q, l, i, r = state.s, state.q, state.l, state.i, state.r
    h, u, f, hu, a = state.h, state.u, state.f, state.hu, state.a

    new_inf = rates.beta * s * i / p_total
    s1 = s + rates.q_s * q - rates.s_q * s - new_inf
    q1 = q + rates.s_q * s - rates.q_s * q
    l1 = l + new_inf - rates.i_l * l
    i1 = i + rates.i_l * l - (rates.i_r + rates.i_h + rates.i_u) * i
    r1 = r + rates.i_r * i
    h1 = h + rates.i_h * i - (rates.h_u + rates.h_f + rates.h_a) * h
    u1 = u + rates.i_u * i + rates.h_u * h - (rates.u_f + rates.u_hu) * u
    f1 = f + rates.h_f * h + rates.u_f * u
    hu1 = hu + rates.u_hu * u - rates.hu_a * hu
    a1 = a + rates.h_a * h + rates.hu_a * hu
    return CompartmentState(s1, q1, l1, i1, r1, h1, u1, f1, hu1, a1, day=state.day + 1)


def simulate(
    config: PopulationConfig, schedule: ParameterSchedule, horizon_days: int
) -> Trajectory:
    """Iterate `step` for `horizon_days` days under the schedule's effective
    rates; returns days 0..horizon_days with day 0 equal to the initial state.
    """
    if horizon_days < 0:
        raise ScheduleError(f"horizon_days must be >= 0, got {horizon_days}")
    schedule.validate(horizon_days)
    matrix = schedule.rate_matrix(horizon_days)
    bad = first_invalid_rate_day(matrix)
    if bad is not None:
        raise SimulationDayError(bad[0], InvalidRatesError(bad[1]))
    path = engine.simulate_path(config.initial_state.as_array(), matrix, config.p_total)
    negative = np.argwhere(path < 0.0)
    if negative.size:
        day = int(negative[0, 0])
        raise SimulationDayError(
            day, InvalidStateError("compartment went negative (outflow exceeded source)")
        )
    return Trajectory(array=path)


def r0(rates: RateSet) -> float:
    """Basic reproduction number beta/(i_r + i_h + i_u)."""
    removal = rates.removal_rate()
    if removal == 0.0:
        raise ZeroDenominatorError("i_r + i_h + i_u is zero")
    return rates.beta / removal


def beta_for_r0(target_r0: float, rates: RateSet) -> float:
    """Transmission rate realizing `target_r0` under the given removal rates."""
    if target_r0 < 0.0 or not math.isfinite(target_r0):
        raise InvalidRatesError(f"target_r0 must be finite and >= 0, got {target_r0}")
    removal = rates.removal_rate()
    if removal == 0.0:
        raise ZeroDenominatorError("i_r + i_h + i_u is zero")
    return target_r0 * removal
