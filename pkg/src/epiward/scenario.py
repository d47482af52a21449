"""Intervention calendars, ensemble scenario runs and peak/valley reports.

A scenario is a base parameterization plus dated intervention windows. Windows
override transmission (a reproduction-number target or a multiplier) or move
people into home confinement; everything else about the disease course stays
at the calibrated rates. Running a scenario over a parameter ensemble yields
percentile bands, from which local extrema are extracted for planning tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable, Sequence

from scipy.signal import find_peaks

from .calibration import EnsembleResult, percentile_bands
from .errors import EnsembleError, ScenarioError
from .model import (
    ParameterSchedule,
    PopulationConfig,
    RateOverride,
    RateSet,
    beta_for_r0,
    simulate,
)

EFFECT_KINDS = ("rt_target", "beta_multiplier", "confine_fraction")

# Confinement windows: the back-leak while confined, and the release flow
# applied after the window until the next window or the horizon.
CONFINE_LEAK_Q_S = 0.05
RELEASE_Q_S = 0.3


@dataclass(frozen=True)
class InterventionWindow:
    """A dated period overriding transmission or confinement parameters."""

    start_date: date
    duration_days: int
    effect_kind: str
    effect_value: float

    def __post_init__(self):
        if self.duration_days < 1:
            raise ScenarioError(f"duration_days must be >= 1, got {self.duration_days}")
        if self.effect_kind not in EFFECT_KINDS:
            raise ScenarioError(f"unknown effect kind {self.effect_kind!r}")
        if self.effect_kind == "confine_fraction":
            if not 0.0 <= self.effect_value <= 1.0:
                raise ScenarioError(
                    f"confine_fraction must lie in [0, 1], got {self.effect_value}"
                )
        elif self.effect_value < 0.0:
            raise ScenarioError(f"{self.effect_kind} must be >= 0, got {self.effect_value}")

    @property
    def end_date(self) -> date:
        """First day after the window."""
        return self.start_date + timedelta(days=self.duration_days)


@dataclass(frozen=True)
class Scenario:
    name: str
    config: PopulationConfig
    base_rates: RateSet
    windows: tuple[InterventionWindow, ...]
    horizon_days: int
    release_rt: float

    def __post_init__(self):
        if self.release_rt < 0.0:
            raise ScenarioError(f"release_rt must be >= 0, got {self.release_rt}")
        if self.horizon_days < 1:
            raise ScenarioError(f"horizon_days must be >= 1, got {self.horizon_days}")
        starts = [w.start_date for w in self.windows]
        if starts != sorted(starts):
            raise ScenarioError("windows must be sorted by start_date")
        for w in self.windows:
            day_from = (w.start_date - self.config.start_date).days
            if day_from < 0 or day_from + w.duration_days > self.horizon_days:
                raise ScenarioError(
                    f"window starting {w.start_date} falls outside the horizon"
                )

    def window_days(self, window: InterventionWindow) -> tuple[int, int]:
        """(first, last) simulated day index the window covers."""
        day_from = (window.start_date - self.config.start_date).days
        return day_from, day_from + window.duration_days - 1


def _confine_overrides(
    scenario: Scenario,
    window: InterventionWindow,
    next_start: int | None,
    leak_q_s: float,
    release_q_s: float,
) -> list[RateOverride]:
    fraction = window.effect_value
    if fraction >= 1.0:
        raise ScenarioError("confine_fraction of 1.0 cannot be realized by a bounded rate")
    # steady state of the S<->Q flow puts Q/(Q+S) at s_q/(s_q+q_s)
    s_q = leak_q_s * fraction / (1.0 - fraction)
    if s_q > 1.0:
        raise ScenarioError(
            f"confine_fraction {fraction} needs s_q {s_q:.3f} above the rate bound"
        )
    day_from, day_to = scenario.window_days(window)
    overrides = [RateOverride(day_from, day_to, {"s_q": s_q, "q_s": leak_q_s})]
    drain_to = (next_start - 1) if next_start is not None else scenario.horizon_days - 1
    if day_to + 1 <= drain_to:
        overrides.append(RateOverride(day_to + 1, drain_to, {"s_q": 0.0, "q_s": release_q_s}))
    return overrides


def _compile(
    scenario: Scenario,
    rates: RateSet,
    baseline_beta: float,
    leak_q_s: float,
    release_q_s: float,
) -> ParameterSchedule:
    base = rates.replace(beta=baseline_beta)
    overrides: list[RateOverride] = []
    confine_starts = [
        scenario.window_days(w)[0]
        for w in scenario.windows
        if w.effect_kind == "confine_fraction"
    ]
    for w in scenario.windows:
        day_from, day_to = scenario.window_days(w)
        if w.effect_kind == "rt_target":
            overrides.append(
                RateOverride(day_from, day_to, {"beta": beta_for_r0(w.effect_value, rates)})
            )
        elif w.effect_kind == "beta_multiplier":
            overrides.append(
                RateOverride(day_from, day_to, {"beta": w.effect_value * baseline_beta})
            )
        else:
            later = [s for s in confine_starts if s > day_from]
            next_start = min(later) if later else None
            overrides.extend(
                _confine_overrides(scenario, w, next_start, leak_q_s, release_q_s)
            )
    schedule = ParameterSchedule(base=base, overrides=tuple(overrides))
    schedule.validate(scenario.horizon_days)
    return schedule


def compile_scenario(
    scenario: Scenario,
    leak_q_s: float = CONFINE_LEAK_Q_S,
    release_q_s: float = RELEASE_Q_S,
) -> ParameterSchedule:
    """Translate the intervention calendar into a day-indexed rate schedule
    for the scenario's base rates; outside windows the transmission rate
    realizes release_rt."""
    baseline_beta = beta_for_r0(scenario.release_rt, scenario.base_rates)
    return _compile(scenario, scenario.base_rates, baseline_beta, leak_q_s, release_q_s)


def run_ensemble(
    scenario: Scenario,
    ensemble: Sequence[RateSet],
    probs: tuple[float, float] = (2.5, 97.5),
    leak_q_s: float = CONFINE_LEAK_Q_S,
    release_q_s: float = RELEASE_Q_S,
) -> EnsembleResult:
    """Simulate every ensemble member under the scenario and band the runs.

    Window effects are re-resolved per member (an rt_target realizes its
    target through the member's own removal rates); outside windows each
    member keeps its own calibrated transmission rate, which is what spreads
    the band."""
    if len(ensemble) == 0:
        raise EnsembleError("empty ensemble")
    trajectories = []
    for k, member in enumerate(ensemble):
        try:
            schedule = _compile(scenario, member, member.beta, leak_q_s, release_q_s)
            trajectories.append(
                simulate(scenario.config, schedule, scenario.horizon_days).array
            )
        except (ScenarioError, EnsembleError):
            raise
        except Exception as exc:
            raise EnsembleError(f"ensemble member {k} failed: {exc}") from exc
    return percentile_bands(trajectories, probs, start_date=scenario.config.start_date)


# -- extrema ------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremaEntry:
    date: date
    series: str
    kind: str  # "peak" | "valley"
    mean: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class ExtremaReport:
    entries: tuple[ExtremaEntry, ...] = field(default_factory=tuple)

    def for_series(self, name: str) -> tuple[ExtremaEntry, ...]:
        return tuple(e for e in self.entries if e.series == name)


def _alternating(events: list[tuple[int, str, float]]) -> list[tuple[int, str, float]]:
    """Collapse runs of same-kind events, keeping the most extreme one."""
    kept: list[tuple[int, str, float]] = []
    for day, kind, value in events:
        if kept and kept[-1][1] == kind:
            _, _, prev = kept[-1]
            if (kind == "peak" and value > prev) or (kind == "valley" and value < prev):
                kept[-1] = (day, kind, value)
            continue
        kept.append((day, kind, value))
    return kept


def detect_extrema(
    result: EnsembleResult,
    compartments: Iterable[str] = ("I", "H", "U"),
    min_separation_days: int = 7,
    min_prominence: float | None = None,
) -> ExtremaReport:
    """Local peaks and valleys of the band means, prominence- and
    separation-filtered, each carrying that day's band.

    min_prominence defaults to 2% of the series maximum (suppresses numerical
    ripples); pass an absolute value for shift-invariant behavior.
    """
    if min_separation_days < 1:
        raise ScenarioError(f"min_separation_days must be >= 1, got {min_separation_days}")
    if min_prominence is not None and min_prominence < 0:
        raise ScenarioError(f"min_prominence must be >= 0, got {min_prominence}")
    entries: list[ExtremaEntry] = []
    wanted = [name for name in result.names if name in set(compartments)]
    for name in wanted:
        mean, lower, upper = result.series(name)
        prominence = min_prominence
        if prominence is None:
            prominence = 0.02 * float(mean.max()) if mean.size else 0.0
        peaks, _ = find_peaks(mean, distance=min_separation_days, prominence=prominence)
        valleys, _ = find_peaks(-mean, distance=min_separation_days, prominence=prominence)
        events = sorted(
            [(int(k), "peak", float(mean[k])) for k in peaks]
            + [(int(k), "valley", float(mean[k])) for k in valleys]
        )
        for day, kind, value in _alternating(events):
            entries.append(
                ExtremaEntry(
                    date=result.start_date + timedelta(days=day),
                    series=name,
                    kind=kind,
                    mean=value,
                    ci_low=float(lower[day]),
                    ci_high=float(upper[day]),
                )
            )
    entries.sort(key=lambda e: (e.date, e.series))
    return ExtremaReport(entries=tuple(entries))
