"""Flat-file ingestion and emission.

All CSVs use comma separators, ISO-8601 dates, UTF-8 and \\n line endings,
with no quoting (there is no free text). Floats are serialized with Python's
shortest round-trip repr so that write-parse-write is byte-stable. Schemas are
documented with examples in docs/formats.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .calibration import BAND_NAMES, CENSUS_NAMES, EnsembleResult, ObservedSeries
from .errors import CsvFormatError, InvalidStateError
from .model import COMPARTMENTS, QuarantineSchedule, Trajectory

OBSERVED_HEADER = "date,hospitalized,icu,recovered,deceased"
MOBILITY_HEADER = "date,percent_change"
BANDS_HEADER = "date,compartment,mean,p2_5,p97_5"
TRAJECTORY_HEADER = "date," + ",".join(name.upper() for name in COMPARTMENTS)


@dataclass(frozen=True, eq=False)
class MobilitySeries:
    """Per-day fractional change of mobility from baseline, in [-1, 1]."""

    dates: tuple[date, ...]
    mobility_change: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mobility_change, dtype=np.float64)
        object.__setattr__(self, "mobility_change", arr)
        if len(self.dates) == 0:
            raise InvalidStateError("mobility series is empty")
        if len(arr) != len(self.dates):
            raise InvalidStateError("mobility values and dates differ in length")
        if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
            raise InvalidStateError("mobility change must lie in [-1, 1]")
        for k in range(1, len(self.dates)):
            if self.dates[k] != self.dates[k - 1] + timedelta(days=1):
                raise InvalidStateError(f"dates not consecutive at {self.dates[k]}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MobilitySeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(
            self.mobility_change, other.mobility_change
        )


def _lines(data: bytes, expected_header: str) -> list[list[str]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CsvFormatError(f"not valid UTF-8: {exc}") from exc
    lines = text.replace("\r\n", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CsvFormatError("empty file", line=1)
    if lines[0] != expected_header:
        raise CsvFormatError(f"expected header {expected_header!r}, got {lines[0]!r}", line=1)
    if len(lines) == 1:
        raise CsvFormatError("no data rows", line=1)
    return [line.split(",") for line in lines[1:]]


def _parse_date(token: str, line: int) -> date:
    try:
        return date.fromisoformat(token)
    except ValueError as exc:
        raise CsvFormatError(f"bad date {token!r}", line=line) from exc


def _parse_number(token: str, line: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise CsvFormatError(f"bad {column} value {token!r}", line=line) from exc
    if not np.isfinite(value):
        raise CsvFormatError(f"non-finite {column} value {token!r}", line=line)
    return value


def parse_observed_csv(data: bytes) -> ObservedSeries:
    """Read `date,hospitalized,icu,recovered,deceased` rows into an
    ObservedSeries; rejects gaps, negative counts and decreasing cumulatives,
    reporting the offending line."""
    rows = _lines(data, OBSERVED_HEADER)
    dates: list[date] = []
    columns: list[list[float]] = [[], [], [], []]
    for k, row in enumerate(rows):
        line = k + 2
        if len(row) != 5:
            raise CsvFormatError(f"expected 5 fields, got {len(row)}", line=line)
        day = _parse_date(row[0], line)
        if dates and day != dates[-1] + timedelta(days=1):
            raise CsvFormatError(f"date gap: {dates[-1]} is followed by {day}", line=line)
        values = [
            _parse_number(token, line, name)
            for token, name in zip(row[1:], ("hospitalized", "icu", "recovered", "deceased"))
        ]
        for name, value in zip(("hospitalized", "icu", "recovered", "deceased"), values):
            if value < 0:
                raise CsvFormatError(f"negative {name} count {value}", line=line)
        for col, name in ((2, "recovered"), (3, "deceased")):
            if columns[col] and values[col] < columns[col][-1]:
                raise CsvFormatError(
                    f"non-monotone cumulative {name!r} at day {k} ({day}): "
                    f"{values[col]} after {columns[col][-1]}",
                    line=line,
                )
        dates.append(day)
        for col in range(4):
            columns[col].append(values[col])
    return ObservedSeries(
        dates=tuple(dates),
        h_census=np.array(columns[0]),
        u_census=np.array(columns[1]),
        r_cum=np.array(columns[2]),
        f_cum=np.array(columns[3]),
    )


def write_observed_csv(series: ObservedSeries) -> bytes:
    lines = [OBSERVED_HEADER]
    for k, day in enumerate(series.dates):
        lines.append(
            f"{day.isoformat()},{float(series.h_census[k])!r},{float(series.u_census[k])!r},"
            f"{float(series.r_cum[k])!r},{float(series.f_cum[k])!r}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_mobility_csv(data: bytes) -> MobilitySeries:
    """Read `date,percent_change` rows (percent integers or decimals within
    [-100, 100]) into per-day fractions."""
    rows = _lines(data, MOBILITY_HEADER)
    dates: list[date] = []
    values: list[float] = []
    for k, row in enumerate(rows):
        line = k + 2
        if len(row) != 2:
            raise CsvFormatError(f"expected 2 fields, got {len(row)}", line=line)
        day = _parse_date(row[0], line)
        if dates and day != dates[-1] + timedelta(days=1):
            raise CsvFormatError(f"date gap: {dates[-1]} is followed by {day}", line=line)
        percent = _parse_number(row[1], line, "percent_change")
        if abs(percent) > 100.0:
            raise CsvFormatError(f"percent_change {percent} outside [-100, 100]", line=line)
        dates.append(day)
        values.append(percent / 100.0)
    return MobilitySeries(dates=tuple(dates), mobility_change=np.array(values))


def derive_quarantine_schedule(
    mobility: MobilitySeries,
    smoothing_days: int = 7,
    *,
    dip_threshold: float = -0.2,
    anchor_mobility: float = -0.55,
    s_q_max: float = 0.3,
    drain_q_s: float = 0.1,
) -> QuarantineSchedule:
    """Map mobility drops to confinement flows.

    The mobility change is smoothed with a centered moving average. While the
    smoothed value sits below dip_threshold, people enter quarantine at
    s_q = min(s_q_max, value * s_q_max / anchor_mobility) (the anchor: a -55%
    mobility drop yields the full 0.3 inflow) with no return flow; once it
    recovers, the inflow stops and q_s = drain_q_s lets the quarantined group
    drain for the rest of the series.
    """
    if smoothing_days < 1:
        raise InvalidStateError(f"smoothing_days must be >= 1, got {smoothing_days}")
    values = mobility.mobility_change
    half = (smoothing_days - 1) // 2
    smooth = np.empty_like(values)
    for k in range(len(values)):
        lo = max(0, k - half)
        hi = min(len(values), k + half + 1)
        smooth[k] = values[lo:hi].mean()
    s_q = np.zeros_like(values)
    q_s = np.zeros_like(values)
    seen_dip = False
    for k, value in enumerate(smooth):
        if value < dip_threshold:
            seen_dip = True
            s_q[k] = min(s_q_max, value * s_q_max / anchor_mobility)
        elif seen_dip:
            q_s[k] = drain_q_s
    return QuarantineSchedule(start_date=mobility.dates[0], s_q=s_q, q_s=q_s)


def write_bands_csv(result: EnsembleResult) -> bytes:
    """Serialize a band result as `date,compartment,mean,p2_5,p97_5` rows,
    days ascending, compartments in canonical order (any derived census
    series follow the ten compartments). Byte-deterministic."""
    lines = [BANDS_HEADER]
    dates = result.dates
    for day in range(result.n_days):
        stamp = dates[day].isoformat()
        for name in result.names:
            col = result.column(name)
            lines.append(
                f"{stamp},{name},{float(result.mean[day, col])!r},"
                f"{float(result.lower[day, col])!r},{float(result.upper[day, col])!r}"
            )
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_bands_csv(data: bytes) -> EnsembleResult:
    rows = _lines(data, BANDS_HEADER)
    known_order = {name: k for k, name in enumerate(BAND_NAMES + CENSUS_NAMES)}
    by_day: dict[date, dict[str, tuple[float, float, float]]] = {}
    names_seen: list[str] = []
    for k, row in enumerate(rows):
        line = k + 2
        if len(row) != 5:
            raise CsvFormatError(f"expected 5 fields, got {len(row)}", line=line)
        day = _parse_date(row[0], line)
        name = row[1]
        if name not in known_order:
            raise CsvFormatError(f"unknown series {name!r}", line=line)
        mean = _parse_number(row[2], line, "mean")
        lower = _parse_number(row[3], line, "p2_5")
        upper = _parse_number(row[4], line, "p97_5")
        slot = by_day.setdefault(day, {})
        if name in slot:
            raise CsvFormatError(f"duplicate series {name!r} for {day}", line=line)
        slot[name] = (mean, lower, upper)
        if name not in names_seen:
            names_seen.append(name)
    days = sorted(by_day)
    for prev, nxt in zip(days, days[1:]):
        if nxt != prev + timedelta(days=1):
            raise CsvFormatError(f"date gap: {prev} is followed by {nxt}")
    names = tuple(sorted(names_seen, key=known_order.__getitem__))
    for day in days:
        if set(by_day[day]) != set(names):
            raise CsvFormatError(f"day {day} misses some series rows")
    mean = np.array([[by_day[d][n][0] for n in names] for d in days])
    lower = np.array([[by_day[d][n][1] for n in names] for d in days])
    upper = np.array([[by_day[d][n][2] for n in names] for d in days])
    return EnsembleResult(
        start_date=days[0], names=names, mean=mean, lower=lower, upper=upper
    )


def write_trajectory_csv(trajectory: Trajectory, start_date: date) -> bytes:
    """Wide per-day CSV of a single simulated run."""
    lines = [TRAJECTORY_HEADER]
    for day, row in enumerate(trajectory.array):
        stamp = (start_date + timedelta(days=day)).isoformat()
        lines.append(stamp + "," + ",".join(repr(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")
