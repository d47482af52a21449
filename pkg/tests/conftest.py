import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from epiward.model import COMPARTMENTS, RATE_FIELDS, CompartmentState, RateSet


def random_state(rng: np.random.Generator, p_total: float, day: int = 0) -> CompartmentState:
    """Nonnegative state summing exactly to p_total (last group absorbs)."""
    parts = rng.dirichlet(np.ones(len(COMPARTMENTS))) * p_total
    parts[-1] = p_total - parts[:-1].sum()
    return CompartmentState(*(float(v) for v in parts), day=day)


def random_rates(
    rng: np.random.Generator, max_outflow: float = 1.0, *, chain_safe: bool = False
) -> RateSet:
    """Valid random rates; outflow group sums capped at max_outflow.

    With chain_safe, beta is drawn below 1 - s_q so that the susceptible
    outflow fraction s_q + beta*I/P_T stays below 1 for any reachable state
    and chained stepping keeps every compartment nonnegative.
    """

    def split(n: int) -> list[float]:
        total = rng.uniform(0.0, max_outflow)
        weights = rng.dirichlet(np.ones(n))
        return [float(total * w) for w in weights]

    i_r, i_h, i_u = split(3)
    h_u, h_f, h_a = split(3)
    u_f, u_hu = split(2)
    s_q = float(rng.uniform(0.0, max_outflow))
    beta = float(rng.uniform(0.0, (1.0 - s_q) if chain_safe else 1.0))
    return RateSet(
        beta=beta,
        s_q=s_q,
        q_s=float(rng.uniform(0.0, max_outflow)),
        i_l=float(rng.uniform(0.0, max_outflow)),
        i_r=i_r,
        i_h=i_h,
        i_u=i_u,
        h_u=h_u,
        h_f=h_f,
        h_a=h_a,
        u_f=u_f,
        u_hu=u_hu,
        hu_a=float(rng.uniform(0.0, max_outflow)),
    )


def rates_dict(rates: RateSet) -> dict:
    return {name: getattr(rates, name) for name in RATE_FIELDS}


def state_dict(state: CompartmentState) -> dict:
    return {name: getattr(state, name) for name in COMPARTMENTS}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20210315)
