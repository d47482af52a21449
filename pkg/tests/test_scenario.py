"""Intervention compilation, ensemble runs and extrema detection."""

from dataclasses import replace
from datetime import date, timedelta

import numpy as np
import pytest

from epiward.calibration import percentile_bands
from epiward.errors import EnsembleError, ScenarioError
from epiward.model import RateSet, beta_for_r0, r0, simulate
from epiward.presets import synthetic_population, synthetic_rates
from epiward.scenario import (
    InterventionWindow,
    Scenario,
    compile_scenario,
    detect_extrema,
    run_ensemble,
)

START = date(2020, 9, 1)


def make_scenario(windows=(), horizon=120, release_rt=0.8, base=None):
    config = synthetic_population(START)
    return Scenario(
        name="test",
        config=config,
        base_rates=base or synthetic_rates(),
        windows=tuple(windows),
        horizon_days=horizon,
        release_rt=release_rt,
    )


def window(day_offset, duration, kind, value):
    return InterventionWindow(
        start_date=START + timedelta(days=day_offset),
        duration_days=duration,
        effect_kind=kind,
        effect_value=value,
    )


class TestWindowValidation:
    def test_effect_domains(self):
        with pytest.raises(ScenarioError):
            window(0, 0, "rt_target", 0.8)
        with pytest.raises(ScenarioError):
            window(0, 7, "rt_target", -0.1)
        with pytest.raises(ScenarioError):
            window(0, 7, "confine_fraction", 1.2)
        with pytest.raises(ScenarioError):
            window(0, 7, "no_such_effect", 0.5)

    def test_scenario_invariants(self):
        with pytest.raises(ScenarioError, match="sorted"):
            make_scenario([window(20, 7, "rt_target", 0.8), window(5, 7, "rt_target", 0.8)])
        with pytest.raises(ScenarioError, match="horizon"):
            make_scenario([window(115, 14, "rt_target", 0.8)])
        with pytest.raises(ScenarioError, match="release_rt"):
            make_scenario(release_rt=-1.0)


class TestCompileScenario:
    def test_no_windows_constant_release_beta(self):
        # removal rate 0.2 and release 0.8 pin beta at 0.16 on every day
        base = RateSet(beta=0.9, i_l=0.3, i_r=0.1, i_h=0.06, i_u=0.04)
        scenario = make_scenario(base=base)
        schedule = compile_scenario(scenario)
        assert schedule.overrides == ()
        for day in (0, 50, 119):
            assert schedule.effective(day).beta == pytest.approx(0.16, abs=1e-15)

    def test_rt_window_overrides_exact_days(self):
        scenario = make_scenario([window(10, 14, "rt_target", 0.8)], release_rt=1.5)
        schedule = compile_scenario(scenario)
        release_beta = beta_for_r0(1.5, scenario.base_rates)
        target_beta = beta_for_r0(0.8, scenario.base_rates)
        for day in range(120):
            expected = target_beta if 10 <= day <= 23 else release_beta
            assert schedule.effective(day).beta == pytest.approx(expected, abs=1e-15)

    def test_rt_window_only_touches_beta(self):
        scenario = make_scenario([window(10, 14, "rt_target", 0.8)])
        schedule = compile_scenario(scenario)
        inside, outside = schedule.effective(15), schedule.effective(5)
        for name in ("i_l", "i_r", "i_h", "i_u", "h_u", "h_f", "h_a", "u_f", "u_hu", "hu_a"):
            assert getattr(inside, name) == getattr(outside, name)

    def test_beta_multiplier_scales_release_beta(self):
        scenario = make_scenario([window(10, 7, "beta_multiplier", 0.5)], release_rt=1.0)
        schedule = compile_scenario(scenario)
        release_beta = beta_for_r0(1.0, scenario.base_rates)
        assert schedule.effective(12).beta == pytest.approx(0.5 * release_beta)

    def test_compile_is_pure_and_idempotent(self):
        scenario = make_scenario(
            [window(10, 14, "rt_target", 0.8), window(40, 14, "confine_fraction", 0.6)]
        )
        assert compile_scenario(scenario) == compile_scenario(scenario)

    def test_confine_window_reaches_target_share(self):
        # transmission off isolates the S<->Q exchange; spec-style check of the
        # steady-state confined share after 60 days
        scenario = make_scenario(
            [window(0, 60, "confine_fraction", 0.7)], horizon=60, release_rt=0.0
        )
        schedule = compile_scenario(scenario)
        traj = simulate(scenario.config, schedule, 60)
        s, q = traj.series("s")[-1], traj.series("q")[-1]
        assert q / (q + s) == pytest.approx(0.7, abs=0.02)

    def test_confine_drain_applies_after_window(self):
        scenario = make_scenario([window(10, 14, "confine_fraction", 0.7)], horizon=60)
        schedule = compile_scenario(scenario)
        inside = schedule.effective(20)
        assert inside.q_s == pytest.approx(0.05)
        assert inside.s_q == pytest.approx(0.05 * 0.7 / 0.3)
        after = schedule.effective(24)
        assert after.s_q == 0.0
        assert after.q_s == pytest.approx(0.3)

    def test_unrealizable_confinement_rejected(self):
        with pytest.raises(ScenarioError):
            compile_scenario(make_scenario([window(0, 7, "confine_fraction", 0.99)]))


class TestRunEnsemble:
    def test_singleton_collapses_onto_trajectory(self):
        member = synthetic_rates()
        scenario = make_scenario([window(10, 14, "rt_target", 0.8)], base=member)
        result = run_ensemble(scenario, [member])
        traj = simulate(
            scenario.config,
            compile_scenario(replace(scenario, release_rt=r0(member))),
            scenario.horizon_days,
        )
        np.testing.assert_allclose(result.mean[:, :10], traj.array, rtol=1e-12)
        np.testing.assert_array_equal(result.lower, result.upper)

    def test_identical_members_zero_width(self):
        member = synthetic_rates()
        scenario = make_scenario()
        result = run_ensemble(scenario, [member] * 8)
        np.testing.assert_array_equal(result.lower, result.upper)

    def test_member_keeps_own_beta_outside_windows(self):
        hot = synthetic_rates(beta=0.6)
        cold = synthetic_rates(beta=0.3)
        scenario = make_scenario()
        hot_only = run_ensemble(scenario, [hot])
        cold_only = run_ensemble(scenario, [cold])
        i_hot = hot_only.series("I")[0]
        i_cold = cold_only.series("I")[0]
        assert i_hot[40] > i_cold[40]

    def test_rt_target_realized_per_member(self, rng):
        # effective reproduction number inside the window equals the target
        # for members with different removal rates
        scenario = make_scenario([window(10, 14, "rt_target", 0.8)])
        for _ in range(10):
            member = synthetic_rates(beta=float(rng.uniform(0.2, 0.9)))
            jitter = float(rng.uniform(0.9, 1.1))
            member = replace(
                member, i_r=member.i_r * jitter, i_h=member.i_h * jitter, i_u=member.i_u * jitter
            )
            from epiward.scenario import _compile

            schedule = _compile(scenario, member, member.beta, 0.05, 0.3)
            assert r0(schedule.effective(15)) == pytest.approx(0.8, abs=1e-12)
            assert schedule.effective(5).beta == member.beta

    def test_beta_jitter_widens_band_at_peak(self, rng):
        members = [
            synthetic_rates(beta=0.55 * float(rng.uniform(0.9, 1.1))) for _ in range(200)
        ]
        scenario = make_scenario(horizon=150, base=synthetic_rates(beta=0.55))
        result = run_ensemble(scenario, members)
        i_mean, i_low, i_high = result.series("I")
        width = i_high - i_low
        assert width[0] == 0.0
        assert width[int(np.argmax(i_mean))] > width[0]

    def test_day0_band_is_initial_state(self):
        scenario = make_scenario()
        result = run_ensemble(scenario, [synthetic_rates(), synthetic_rates(beta=0.2)])
        np.testing.assert_array_equal(
            result.mean[0, :10], scenario.config.initial_state.as_array()
        )
        np.testing.assert_array_equal(result.lower[0, :10], result.upper[0, :10])

    def test_empty_ensemble_rejected(self):
        with pytest.raises(EnsembleError):
            run_ensemble(make_scenario(), [])


class TestDetectExtrema:
    def band_of(self, series):
        arr = np.zeros((len(series), 10))
        arr[:, 3] = series
        return percentile_bands([arr])

    def test_monotone_series_empty_report(self):
        report = detect_extrema(self.band_of(np.arange(50.0)), min_prominence=0.0)
        assert report.entries == ()

    def test_single_bump(self):
        report = detect_extrema(
            self.band_of(np.array([0.0, 1.0, 0.0])), min_separation_days=1, min_prominence=0.0
        )
        entries = report.for_series("I")
        assert len(entries) == 1
        assert entries[0].kind == "peak"
        assert entries[0].date == date(2020, 1, 2)
        assert entries[0].mean == 1.0

    def test_shift_invariance(self, rng):
        series = np.abs(np.cumsum(rng.normal(size=200))) + 5.0
        base = detect_extrema(self.band_of(series), min_separation_days=3, min_prominence=0.5)
        shifted = detect_extrema(
            self.band_of(series + 1000.0), min_separation_days=3, min_prominence=0.5
        )
        assert [(e.date, e.kind) for e in base.entries] == [
            (e.date, e.kind) for e in shifted.entries
        ]

    def test_alternation(self, rng):
        for _ in range(20):
            series = np.abs(np.cumsum(rng.normal(size=300))) + 1.0
            report = detect_extrema(
                self.band_of(series), min_separation_days=5, min_prominence=None
            )
            kinds = [e.kind for e in report.for_series("I")]
            for a, b in zip(kinds, kinds[1:]):
                assert a != b

    def test_entries_carry_band_values(self, rng):
        arrays = [np.zeros((60, 10)) for _ in range(20)]
        bump = np.concatenate([np.linspace(0, 50, 30), np.linspace(50, 0, 30)])
        for arr in arrays:
            arr[:, 3] = bump * float(rng.uniform(0.8, 1.2))
        result = percentile_bands(arrays)
        report = detect_extrema(result, min_separation_days=1)
        entry = report.for_series("I")[0]
        assert entry.ci_low <= entry.mean <= entry.ci_high
        assert entry.ci_low < entry.ci_high

    def test_two_week_brake_gives_valley_then_higher_peak(self):
        member = synthetic_rates(beta=beta_for_r0(1.6, synthetic_rates()))
        scenario = make_scenario(
            [window(25, 14, "rt_target", 0.8)], horizon=220, release_rt=1.6, base=member
        )
        result = run_ensemble(scenario, [member])
        entries = detect_extrema(result, compartments=("I",)).for_series("I")
        assert [e.kind for e in entries] == ["peak", "valley", "peak"]
        assert entries[2].mean > entries[0].mean

    def test_bad_thresholds_rejected(self):
        band = self.band_of(np.arange(10.0))
        with pytest.raises(ScenarioError):
            detect_extrema(band, min_separation_days=0)
        with pytest.raises(ScenarioError):
            detect_extrema(band, min_prominence=-1.0)
