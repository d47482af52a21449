"""CSV parsing/serialization and the mobility-to-quarantine mapping."""

from datetime import date, timedelta

import numpy as np
import pytest

from epiward.calibration import ObservedSeries, percentile_bands
from epiward.dataio import (
    MobilitySeries,
    derive_quarantine_schedule,
    parse_bands_csv,
    parse_mobility_csv,
    parse_observed_csv,
    write_bands_csv,
    write_observed_csv,
    write_trajectory_csv,
)
from epiward.errors import CsvFormatError
from epiward.model import Trajectory


def observed_bytes(rows):
    return ("date,hospitalized,icu,recovered,deceased\n" + "\n".join(rows) + "\n").encode()


class TestObservedCsv:
    def test_two_valid_rows(self):
        series = parse_observed_csv(
            observed_bytes(["2020-03-15,10,2,0,1", "2020-03-16,12,3,4,1"])
        )
        assert len(series) == 2
        assert series.dates == (date(2020, 3, 15), date(2020, 3, 16))
        np.testing.assert_array_equal(series.h_census, [10.0, 12.0])
        np.testing.assert_array_equal(series.f_cum, [1.0, 1.0])

    def test_decreasing_recovered_names_the_day(self):
        rows = [f"2020-03-{15 + k},5,1,{10 + k},0" for k in range(5)]
        rows.append("2020-03-20,5,1,9,0")  # day index 5 drops the cumulative
        with pytest.raises(CsvFormatError, match="day 5"):
            parse_observed_csv(observed_bytes(rows))

    def test_date_gap_reported_with_line(self):
        with pytest.raises(CsvFormatError, match="gap") as exc:
            parse_observed_csv(observed_bytes(["2020-03-15,1,0,0,0", "2020-03-17,1,0,0,0"]))
        assert exc.value.line == 3

    def test_malformed_row_reports_line(self):
        with pytest.raises(CsvFormatError, match="line 2"):
            parse_observed_csv(observed_bytes(["2020-03-15,1,0,0"]))
        with pytest.raises(CsvFormatError, match="bad icu"):
            parse_observed_csv(observed_bytes(["2020-03-15,1,x,0,0"]))
        with pytest.raises(CsvFormatError, match="negative"):
            parse_observed_csv(observed_bytes(["2020-03-15,-1,0,0,0"]))

    def test_header_and_empty_file_rejected(self):
        with pytest.raises(CsvFormatError, match="header"):
            parse_observed_csv(b"date,hosp\n2020-03-15,1\n")
        with pytest.raises(CsvFormatError, match="no data rows"):
            parse_observed_csv(b"date,hospitalized,icu,recovered,deceased\n")

    def test_round_trip(self, rng):
        n = 40
        start = date(2020, 3, 15)
        series = ObservedSeries(
            dates=tuple(start + timedelta(days=k) for k in range(n)),
            h_census=rng.uniform(0, 500, n),
            u_census=rng.uniform(0, 80, n),
            r_cum=np.cumsum(rng.uniform(0, 30, n)),
            f_cum=np.cumsum(rng.uniform(0, 5, n)),
        )
        assert parse_observed_csv(write_observed_csv(series)) == series

    def test_reserialization_is_byte_identical(self, rng):
        data = observed_bytes(["2020-03-15,10.5,2,0,1", "2020-03-16,12,3,4.25,1"])
        once = write_observed_csv(parse_observed_csv(data))
        twice = write_observed_csv(parse_observed_csv(once))
        assert once == twice


class TestMobilityCsv:
    def test_unit_conversion(self):
        series = parse_mobility_csv(b"date,percent_change\n2020-03-15,-55\n")
        assert series.mobility_change[0] == pytest.approx(-0.55)
        assert series.dates == (date(2020, 3, 15),)

    def test_empty_body_rejected(self):
        with pytest.raises(CsvFormatError, match="no data rows"):
            parse_mobility_csv(b"date,percent_change\n")

    def test_mixed_signs_preserved(self):
        body = "date,percent_change\n2020-03-15,-55\n2020-03-16,10\n2020-03-17,-3.5\n"
        series = parse_mobility_csv(body.encode())
        np.testing.assert_allclose(series.mobility_change, [-0.55, 0.10, -0.035])

    def test_out_of_range_rejected(self):
        with pytest.raises(CsvFormatError, match="outside"):
            parse_mobility_csv(b"date,percent_change\n2020-03-15,-101\n")


class TestQuarantineSchedule:
    def make_mobility(self, values, start=date(2020, 3, 1)):
        return MobilitySeries(
            dates=tuple(start + timedelta(days=k) for k in range(len(values))),
            mobility_change=np.array(values, dtype=float),
        )

    def test_flat_zero_mobility_gives_no_flows(self):
        schedule = derive_quarantine_schedule(self.make_mobility([0.0] * 30))
        assert (schedule.s_q == 0).all()
        assert (schedule.q_s == 0).all()

    def test_constant_dip_hits_anchor_value(self):
        schedule = derive_quarantine_schedule(self.make_mobility([-0.55] * 30))
        np.testing.assert_allclose(schedule.s_q, 0.3)
        assert (schedule.q_s == 0).all()

    def test_step_dip_then_recovery_drains(self):
        values = [-0.55] * 20 + [0.0] * 20
        schedule = derive_quarantine_schedule(self.make_mobility(values), smoothing_days=1)
        assert (schedule.s_q[:20] > 0).all()
        assert (schedule.s_q[20:] == 0).all()
        assert (schedule.q_s[:20] == 0).all()
        np.testing.assert_allclose(schedule.q_s[20:], 0.1)

    def test_linear_rule_between_threshold_and_anchor(self):
        schedule = derive_quarantine_schedule(
            self.make_mobility([-0.275] * 15), smoothing_days=1
        )
        np.testing.assert_allclose(schedule.s_q, 0.15)

    def test_is_smoothed(self):
        # single-day blip below threshold disappears under a 7-day average
        values = [0.0] * 10 + [-0.5] + [0.0] * 10
        schedule = derive_quarantine_schedule(self.make_mobility(values), smoothing_days=7)
        assert (schedule.s_q == 0).all()

    def test_bounds_respected(self, rng):
        values = rng.uniform(-1.0, 1.0, size=120)
        schedule = derive_quarantine_schedule(self.make_mobility(list(values)))
        assert (schedule.s_q >= 0).all() and (schedule.s_q <= 0.3).all()
        assert set(np.unique(schedule.q_s)) <= {0.0, 0.1}


class TestBandsCsv:
    def make_result(self, rng, n_days=5):
        arrays = [rng.uniform(0, 100, size=(n_days, 10)) for _ in range(7)]
        return percentile_bands(arrays, start_date=date(2020, 11, 10))

    def test_single_day_single_series_row_count(self, rng):
        result = self.make_result(rng, n_days=1).restrict(["I"])
        data = write_bands_csv(result)
        lines = data.decode().strip().split("\n")
        assert len(lines) == 2  # header plus exactly one data row
        assert lines[1].startswith("2020-11-10,I,")

    def test_round_trip_equality(self, rng):
        result = self.make_result(rng)
        assert parse_bands_csv(write_bands_csv(result)) == result

    def test_reserialization_byte_identical(self, rng):
        result = self.make_result(rng)
        once = write_bands_csv(result)
        assert write_bands_csv(parse_bands_csv(once)) == once

    def test_row_order_days_then_canonical_series(self, rng):
        result = self.make_result(rng, n_days=2)
        lines = write_bands_csv(result).decode().strip().split("\n")[1:]
        names = [line.split(",")[1] for line in lines]
        expected_block = list(result.names)
        assert names == expected_block * 2
        dates = [line.split(",")[0] for line in lines]
        assert dates == ["2020-11-10"] * 12 + ["2020-11-11"] * 12

    def test_missing_series_rejected(self, rng):
        result = self.make_result(rng, n_days=2)
        data = write_bands_csv(result).decode().strip().split("\n")
        del data[1]  # drop one series row of day 0
        with pytest.raises(CsvFormatError, match="misses"):
            parse_bands_csv(("\n".join(data) + "\n").encode())


def test_trajectory_csv_shape(rng):
    traj = Trajectory(array=rng.uniform(0, 10, size=(4, 10)))
    data = write_trajectory_csv(traj, date(2020, 3, 15))
    lines = data.decode().strip().split("\n")
    assert lines[0] == "date,S,Q,L,I,R,H,U,F,HU,A"
    assert len(lines) == 5
    assert lines[1].split(",")[0] == "2020-03-15"
