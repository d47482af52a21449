"""Default synthetic population and rates for demos and closed-loop tests.

The rates describe a fast-progressing disease (2.5-day latency, 2.5-day
infectious period) in a province-sized population, so that sub- and
supercritical regimes play out within a few simulated months.
"""

from datetime import date

from .model import CompartmentState, PopulationConfig, RateSet

SYNTHETIC_P_TOTAL = 900_000.0


def synthetic_population(start_date: date = date(2020, 9, 1)) -> PopulationConfig:
    """Province-sized population with a seeded outbreak on day 0."""
    state = CompartmentState(
        s=898_850.0,
        q=0.0,
        l=450.0,
        i=350.0,
        r=250.0,
        h=60.0,
        u=10.0,
        f=5.0,
        hu=5.0,
        a=20.0,
    )
    return PopulationConfig(p_total=SYNTHETIC_P_TOTAL, start_date=start_date, initial_state=state)


def synthetic_rates(beta: float = 0.44) -> RateSet:
    """Plausible clinical split: removal rate 0.4/day, 11% of removals to the
    ward, 2.5% straight to ICU. beta=0.44 gives a reproduction number of 1.1."""
    return RateSet(
        beta=beta,
        i_l=0.40,
        i_r=0.345,
        i_h=0.045,
        i_u=0.010,
        h_u=0.050,
        h_f=0.015,
        h_a=0.120,
        u_f=0.040,
        u_hu=0.080,
        hu_a=0.100,
    )
