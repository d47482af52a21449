"""Shared document and file fixtures for CLI/service/acceptance tests."""

from datetime import date, timedelta

import numpy as np

from epiward.calibration import (
    RATE_PARAMS,
    ObservedSeries,
    ParameterVector,
    observable_matrix,
    _simulate_params,
)
from epiward.dataio import write_observed_csv
from epiward.model import beta_for_r0
from epiward.presets import synthetic_population, synthetic_rates
from epiward.schemas import population_to_dict, rates_to_dict

START = date(2020, 9, 1)

# Frozen generator for the synthetic closed-loop checks: two transmission
# regimes switching at day 45 (paper-era mobility-regime analogue).
TRUTH_BREAK_DAY = 45
TRUTH_BETAS = (0.55, 0.28)
CAL_DAYS = 190
NOISE_SEED = 42
NOISE_LEVEL = 0.02


def truth_vector() -> ParameterVector:
    base = synthetic_rates()
    values = np.array([getattr(base, name) for name in RATE_PARAMS] + list(TRUTH_BETAS))
    return ParameterVector(values, (TRUTH_BREAK_DAY,))


def truth_observables(n_days: int = CAL_DAYS):
    config = synthetic_population(START)
    path = _simulate_params(truth_vector(), config, n_days - 1, None)
    return config, observable_matrix(path)


def noisy_observed(n_days: int = CAL_DAYS, seed: int = NOISE_SEED) -> ObservedSeries:
    """Truth observables with multiplicative noise; cumulative series are
    noised on their daily increments so they stay monotone."""
    _, series = truth_observables(n_days)
    rng = np.random.default_rng(seed)

    def censored(values):
        return np.maximum(0.0, values * (1 + NOISE_LEVEL * rng.standard_normal(len(values))))

    def cumulative(values):
        inc = np.diff(values, prepend=0.0)
        inc = np.maximum(0.0, inc * (1 + NOISE_LEVEL * rng.standard_normal(len(inc))))
        return np.cumsum(inc)

    return ObservedSeries(
        dates=tuple(START + timedelta(days=k) for k in range(n_days)),
        h_census=censored(series[:, 0]),
        u_census=censored(series[:, 1]),
        r_cum=cumulative(series[:, 2]),
        f_cum=cumulative(series[:, 3]),
    )


def observed_csv_bytes(n_days: int = CAL_DAYS, seed: int = NOISE_SEED) -> bytes:
    return write_observed_csv(noisy_observed(n_days, seed))


def calibration_bounds() -> list[tuple[float, float]]:
    """Clinical-course rates known to +-5% (registry-derived priors);
    transmission segments wide open."""
    truth = truth_vector().values
    bounds = [(0.95 * truth[k], min(1.0, 1.05 * truth[k])) for k in range(10)]
    return bounds + [(0.1, 1.0), (0.05, 0.6)]


def manifest_doc(n_particles=60, n_iterations=300, seed=2021) -> dict:
    config = synthetic_population(START)
    bounds = calibration_bounds()
    bounds_doc = {name: list(bounds[k]) for k, name in enumerate(RATE_PARAMS)}
    bounds_doc["beta"] = [list(b) for b in bounds[10:]]
    return {
        "population": population_to_dict(config),
        "beta_breakpoints": [(START + timedelta(days=TRUTH_BREAK_DAY)).isoformat()],
        "bounds": bounds_doc,
        "swarm": {
            "n_particles": n_particles,
            "n_iterations": n_iterations,
            "rng_seed": seed,
            "novelty_weight": 0.1,
        },
    }


def scenario_doc(
    windows=None, horizon=220, release_rt=1.6, name="two-week brake"
) -> dict:
    config = synthetic_population(START)
    base = synthetic_rates(beta=beta_for_r0(release_rt, synthetic_rates()))
    if windows is None:
        windows = [
            {
                "start_date": (START + timedelta(days=25)).isoformat(),
                "duration_days": 14,
                "effect": {"kind": "rt_target", "value": 0.8},
            }
        ]
    return {
        "name": name,
        "population": population_to_dict(config),
        "base_rates": rates_to_dict(base),
        "windows": windows,
        "horizon_days": horizon,
        "release_rt": release_rt,
    }


def ensemble_doc(n_members: int = 20, seed: int = 11, spread: float = 0.1) -> dict:
    rng = np.random.default_rng(seed)
    base = synthetic_rates(beta=beta_for_r0(1.6, synthetic_rates()))
    members = []
    for _ in range(n_members):
        members.append(rates_to_dict(base.replace(beta=base.beta * float(rng.uniform(1 - spread, 1 + spread)))))
    return {"kind": "ensemble", "members": members}
