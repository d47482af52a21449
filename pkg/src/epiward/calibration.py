"""Fitting the model to hospital registry series.

A particle swarm searches the space of transition rates plus one transmission
rate per breakpoint segment. On top of the standard velocity/position update,
particles are attracted by a blend of fitness rank and novelty rank, where
novelty is the mean distance of a run's behavioral descriptor (peak ward/ICU
load and timing, final deaths) to its nearest archive entries. Near-optimal,
mutually distant parameter vectors form the ensemble behind the forecast
percentile bands.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Callable, Iterable, Sequence

import numpy as np

from . import engine
from .errors import EnsembleError, InvalidStateError
from .model import COMPARTMENTS, QuarantineSchedule, PopulationConfig, RateSet, Trajectory

# Calibrated transition rates, in vector order; one beta per segment follows.
RATE_PARAMS = ("i_l", "i_r", "i_h", "i_u", "h_u", "h_f", "h_a", "u_f", "u_hu", "hu_a")

# Column indices of the trajectory array (COMPARTMENTS order).
_R, _H, _U, _F, _HU, _A = 4, 5, 6, 7, 8, 9

OBSERVABLES = ("h_census", "u_census", "r_cum", "f_cum")

INFEASIBLE = math.inf


@dataclass(frozen=True, eq=False)
class ObservedSeries:
    """Date-indexed registry counts: ward and ICU census plus cumulative
    recovered and deceased."""

    dates: tuple[date, ...]
    h_census: np.ndarray
    u_census: np.ndarray
    r_cum: np.ndarray
    f_cum: np.ndarray

    def __post_init__(self):
        n = len(self.dates)
        if n == 0:
            raise InvalidStateError("observed series is empty")
        for name in OBSERVABLES:
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            if len(arr) != n:
                raise InvalidStateError(f"{name} has {len(arr)} values for {n} dates")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise InvalidStateError(f"{name} must be finite and >= 0")
        for k in range(1, n):
            if self.dates[k] != self.dates[k - 1] + timedelta(days=1):
                raise InvalidStateError(f"dates not consecutive at {self.dates[k]}")
        for name in ("r_cum", "f_cum"):
            if np.any(np.diff(getattr(self, name)) < 0):
                raise InvalidStateError(f"cumulative series {name} decreases")

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObservedSeries):
            return NotImplemented
        return self.dates == other.dates and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in OBSERVABLES
        )

    def slice_days(self, start: int, stop: int) -> "ObservedSeries":
        """Sub-series for day indices start..stop-1."""
        return ObservedSeries(
            dates=self.dates[start:stop],
            h_census=self.h_census[start:stop],
            u_census=self.u_census[start:stop],
            r_cum=self.r_cum[start:stop],
            f_cum=self.f_cum[start:stop],
        )


@dataclass(frozen=True)
class ParameterVector:
    """Free calibration parameters: the ten transition rates (RATE_PARAMS
    order) followed by one transmission rate per breakpoint segment.

    `breakpoints` are the day indices at which a new beta segment starts;
    segment 0 covers days 0..breakpoints[0]-1.
    """

    values: np.ndarray
    breakpoints: tuple[int, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        expected = len(RATE_PARAMS) + len(self.breakpoints) + 1
        if values.shape != (expected,):
            raise InvalidStateError(
                f"expected {expected} parameters for {len(self.breakpoints)} breakpoints, "
                f"got shape {values.shape}"
            )
        if any(b <= 0 for b in self.breakpoints) or list(self.breakpoints) != sorted(
            set(self.breakpoints)
        ):
            raise InvalidStateError(f"breakpoints must be ascending and > 0: {self.breakpoints}")

    @property
    def n_segments(self) -> int:
        return len(self.breakpoints) + 1

    def rates(self) -> dict[str, float]:
        return {name: float(self.values[k]) for k, name in enumerate(RATE_PARAMS)}

    def betas(self) -> np.ndarray:
        return self.values[len(RATE_PARAMS) :]

    def to_rate_set(self, segment: int = -1) -> RateSet:
        """RateSet using the given segment's beta (default: last segment)."""
        return RateSet(beta=float(self.betas()[segment]), **self.rates())


def build_rate_matrix(
    params: ParameterVector,
    horizon_days: int,
    s_q: np.ndarray | None = None,
    q_s: np.ndarray | None = None,
) -> np.ndarray | None:
    """Per-day (horizon, 13) kernel rate matrix, or None when the vector
    violates the rate bounds (the infeasibility sentinel case)."""
    v = params.values
    rates, betas = v[: len(RATE_PARAMS)], v[len(RATE_PARAMS) :]
    if not np.all(np.isfinite(v)):
        return None
    if np.any(rates < 0.0) or np.any(rates > 1.0) or np.any(betas < 0.0):
        return None
    i_l, i_r, i_h, i_u, h_u, h_f, h_a, u_f, u_hu, hu_a = rates
    if i_r + i_h + i_u > 1.0 or h_u + h_f + h_a > 1.0 or u_f + u_hu > 1.0:
        return None
    matrix = np.zeros((horizon_days, 13))
    segment = np.searchsorted(np.asarray(params.breakpoints), np.arange(horizon_days), side="right")
    matrix[:, 0] = betas[segment]
    if s_q is not None:
        matrix[:, 1] = s_q[:horizon_days]
    if q_s is not None:
        matrix[:, 2] = q_s[:horizon_days]
    matrix[:, 3:] = rates
    return matrix


def observable_matrix(path: np.ndarray) -> np.ndarray:
    """Map a trajectory to the four registry series: ward census (H+HU),
    ICU census (U), cumulative recovered (R+A), cumulative deceased (F)."""
    out = np.empty((path.shape[0], 4))
    out[:, 0] = path[:, _H] + path[:, _HU]
    out[:, 1] = path[:, _U]
    out[:, 2] = path[:, _R] + path[:, _A]
    out[:, 3] = path[:, _F]
    return out


def _simulate_params(
    params: ParameterVector,
    config: PopulationConfig,
    horizon_days: int,
    fixed_sq_qs: QuarantineSchedule | None,
) -> np.ndarray | None:
    if fixed_sq_qs is not None:
        s_q, q_s = fixed_sq_qs.aligned(config.start_date, horizon_days)
    else:
        s_q = q_s = None
    matrix = build_rate_matrix(params, horizon_days, s_q, q_s)
    if matrix is None:
        return None
    path = engine.simulate_path(config.initial_state.as_array(), matrix, config.p_total)
    if not np.all(np.isfinite(path)) or np.any(path < -1e-9 * config.p_total):
        return None
    return path


def loss(
    params: ParameterVector,
    observed: ObservedSeries,
    config: PopulationConfig,
    fixed_sq_qs: QuarantineSchedule | None = None,
    weights: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
) -> float:
    """Sum over the four registry series of RMSE divided by the series
    maximum. Infeasible parameters return the +inf sentinel instead of
    raising, so a swarm objective built on this stays total."""
    offset = (observed.dates[0] - config.start_date).days
    if offset < 0:
        raise InvalidStateError("observed series starts before the simulation start date")
    horizon = offset + len(observed) - 1
    path = _simulate_params(params, config, horizon, fixed_sq_qs)
    if path is None:
        return INFEASIBLE
    model = observable_matrix(path)[offset : offset + len(observed)]
    total = 0.0
    for k, name in enumerate(OBSERVABLES):
        obs = getattr(observed, name)
        rmse = math.sqrt(float(np.mean((model[:, k] - obs) ** 2)))
        norm = float(obs.max())
        total += weights[k] * rmse / (norm if norm > 0.0 else 1.0)
    return total


def behavioral_descriptor(
    params: ParameterVector,
    config: PopulationConfig,
    fixed_sq_qs: QuarantineSchedule | None = None,
    horizon_days: int = 180,
) -> np.ndarray:
    """Raw behavior summary of the induced run: peak ward census (H+HU) and
    its day, peak ICU census and its day, final cumulative deaths.

    The swarm min-max normalizes descriptors by the running bounds of
    everything seen so far; simulation failure yields all-zero sentinel."""
    path = _simulate_params(params, config, horizon_days, fixed_sq_qs)
    if path is None:
        return np.zeros(5)
    census = observable_matrix(path)
    hc, uc = census[:, 0], census[:, 1]
    return np.array(
        [hc.max(), float(hc.argmax()), uc.max(), float(uc.argmax()), census[-1, 3]]
    )


@dataclass(frozen=True)
class SwarmConfig:
    n_particles: int = 40
    n_iterations: int = 200
    w: float = 0.72
    c1: float = 1.49
    c2: float = 1.49
    novelty_weight: float = 0.3
    archive_k: int = 10
    rng_seed: int = 0
    workers: int = 1
    stall_patience: int = 8
    kick_scale: float = 0.02
    ensemble_delta: float = 0.15
    ensemble_max: int = 200
    ensemble_min_dist: float = 0.01

    def __post_init__(self):
        if self.n_particles < 2:
            raise InvalidStateError("n_particles must be >= 2")
        if self.n_iterations < 1:
            raise InvalidStateError("n_iterations must be >= 1")
        if not 0.0 <= self.novelty_weight <= 1.0:
            raise InvalidStateError("novelty_weight must lie in [0, 1]")
        if not 1 <= self.archive_k < self.n_particles * self.n_iterations:
            raise InvalidStateError("archive_k must be >= 1 and < n_particles*n_iterations")


@dataclass(eq=False)
class CalibrationResult:
    """Best vector, near-optimal ensemble and the search trace."""

    best: np.ndarray
    best_loss: float
    ensemble: list[np.ndarray]
    loss_history: np.ndarray
    evaluations: list[tuple[np.ndarray, float]] = field(repr=False, default_factory=list)


class _RunningMinMax:
    """Per-component running bounds used to normalize behavioral descriptors."""

    def __init__(self):
        self.lo: np.ndarray | None = None
        self.hi: np.ndarray | None = None

    def update(self, batch: np.ndarray) -> None:
        lo, hi = batch.min(axis=0), batch.max(axis=0)
        if self.lo is None:
            self.lo, self.hi = lo, hi
        else:
            self.lo = np.minimum(self.lo, lo)
            self.hi = np.maximum(self.hi, hi)

    def normalize(self, batch: np.ndarray) -> np.ndarray:
        span = self.hi - self.lo
        out = np.zeros_like(batch)
        np.divide(batch - self.lo, span, out=out, where=span > 0)
        return out


def _ranks(keys: np.ndarray) -> np.ndarray:
    order = np.argsort(keys, kind="stable")
    ranks = np.empty(len(keys))
    ranks[order] = np.arange(len(keys))
    return ranks


def novelty_swarm(
    objective: Callable[[np.ndarray], float],
    bounds: Sequence[tuple[float, float]],
    cfg: SwarmConfig,
    descriptor: Callable[[np.ndarray], np.ndarray] | None = None,
) -> CalibrationResult:
    """Bound-constrained swarm minimization of a total objective.

    Velocity update is the standard w*v + c1*r1*(pbest-x) + c2*r2*(leader-x)
    with speed capped at half the bound span and positions clamped to bounds
    (a clamped dimension also zeroes its velocity). Personal bests follow raw
    fitness; the social leader is re-chosen each iteration by the blended
    attraction score (1-lambda)*rank_fitness + lambda*rank_novelty over the
    personal bests plus the best-ever vector, so novelty can hand the lead to
    an explorer while the incumbent takes it back once behavioral spread
    collapses. Novelty is the mean distance of a particle's normalized
    descriptor to its archive_k nearest neighbors among the archive and the
    current batch; the archive grows by each iteration's most novel particle.
    Particles whose personal best stalls for stall_patience iterations are
    resampled around it at kick_scale of the span. Deterministic given
    cfg.rng_seed.
    """
    lo = np.array([b[0] for b in bounds], dtype=np.float64)
    hi = np.array([b[1] for b in bounds], dtype=np.float64)
    if len(lo) == 0:
        raise EnsembleError("empty bounds")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
        raise EnsembleError("bounds must be finite with lo < hi")
    span = hi - lo
    if descriptor is None:
        descriptor = lambda x: (x - lo) / span  # noqa: E731

    rng = np.random.default_rng(cfg.rng_seed)
    n, d = cfg.n_particles, len(lo)
    # latin hypercube start: one stratum per particle and dimension
    strata = np.empty((n, d))
    for j in range(d):
        strata[:, j] = (rng.permutation(n) + rng.random(n)) / n
    positions = lo + strata * span
    velocities = np.zeros((n, d))

    evaluations: list[tuple[np.ndarray, float]] = []

    def evaluate(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rows = [row.copy() for row in batch]
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                pairs = list(pool.map(lambda x: (float(objective(x)), np.asarray(descriptor(x), dtype=np.float64)), rows))
        else:
            pairs = [(float(objective(x)), np.asarray(descriptor(x), dtype=np.float64)) for x in rows]
        losses = np.array([p[0] for p in pairs])
        descriptors = np.vstack([p[1] for p in pairs])
        evaluations.extend((row, ls) for row, ls in zip(rows, losses))
        return losses, descriptors

    norm = _RunningMinMax()
    archive_raw: list[np.ndarray] = []

    def novelty_of(batch_raw: np.ndarray, update_bounds: bool = True) -> np.ndarray:
        if update_bounds:
            norm.update(batch_raw)
        batch = norm.normalize(batch_raw)
        pool = norm.normalize(np.vstack(archive_raw)) if archive_raw else np.empty((0, batch.shape[1]))
        rows = np.vstack([pool, batch])
        scores = np.zeros(len(batch))
        for k in range(len(batch)):
            dist = np.linalg.norm(rows - batch[k], axis=1)
            dist[len(pool) + k] = np.inf
            kk = min(cfg.archive_k, len(dist) - 1)
            if kk > 0:
                scores[k] = float(np.mean(np.partition(dist, kk - 1)[:kk]))
        return scores

    def blended_scores(losses: np.ndarray, novelty: np.ndarray) -> np.ndarray:
        lam = cfg.novelty_weight
        return (1.0 - lam) * _ranks(losses) + lam * _ranks(-novelty)

    def pick_leader(pbest_x, pbest_loss, pbest_desc, best_x, best_loss, best_desc):
        cand_desc = np.vstack([pbest_desc, best_desc[None, :]])
        cand_loss = np.append(pbest_loss, best_loss)
        novelty = novelty_of(cand_desc, update_bounds=False)
        scores = blended_scores(cand_loss, novelty)
        idx = int(np.argmin(scores))
        return np.vstack([pbest_x, best_x[None, :]])[idx].copy()

    losses, descriptors = evaluate(positions)
    novelty = novelty_of(descriptors)
    archive_raw.append(descriptors[int(np.argmax(novelty))].copy())

    pbest_x = positions.copy()
    pbest_loss = losses.copy()
    pbest_desc = descriptors.copy()
    b_idx = int(np.argmin(losses))
    best_x = positions[b_idx].copy()
    best_loss = float(losses[b_idx])
    best_desc = descriptors[b_idx].copy()
    loss_history = [best_loss]
    stall = np.zeros(n, dtype=int)

    v_max = 0.5 * span
    for _ in range(cfg.n_iterations):
        leader = pick_leader(pbest_x, pbest_loss, pbest_desc, best_x, best_loss, best_desc)
        r1 = rng.random((n, d))
        r2 = rng.random((n, d))
        velocities = (
            cfg.w * velocities
            + cfg.c1 * r1 * (pbest_x - positions)
            + cfg.c2 * r2 * (leader - positions)
        )
        velocities = np.clip(velocities, -v_max, v_max)
        moved = positions + velocities
        positions = np.clip(moved, lo, hi)
        velocities[moved != positions] = 0.0  # hit a wall: stop outward drift

        losses, descriptors = evaluate(positions)
        novelty = novelty_of(descriptors)
        archive_raw.append(descriptors[int(np.argmax(novelty))].copy())

        improved = losses < pbest_loss
        stall[~improved] += 1
        stall[improved] = 0
        pbest_x[improved] = positions[improved]
        pbest_loss[improved] = losses[improved]
        pbest_desc[improved] = descriptors[improved]

        b_idx = int(np.argmin(losses))
        if float(losses[b_idx]) < best_loss:
            best_x = positions[b_idx].copy()
            best_loss = float(losses[b_idx])
            best_desc = descriptors[b_idx].copy()
        loss_history.append(best_loss)

        # resample long-stalled particles near their personal best; the
        # memory survives, so this only ever widens the searched valley
        for k in np.where(stall >= cfg.stall_patience)[0]:
            positions[k] = np.clip(
                pbest_x[k] + cfg.kick_scale * span * rng.standard_normal(d), lo, hi
            )
            velocities[k] = 0.0
            stall[k] = 0

    ensemble = select_ensemble(
        evaluations,
        delta=cfg.ensemble_delta,
        n_max=cfg.ensemble_max,
        min_dist=cfg.ensemble_min_dist,
        span=span,
    )
    return CalibrationResult(
        best=best_x,
        best_loss=best_loss,
        ensemble=ensemble,
        loss_history=np.array(loss_history),
        evaluations=evaluations,
    )


def select_ensemble(
    history: Sequence[tuple[np.ndarray, float]],
    delta: float = 0.15,
    n_max: int = 200,
    min_dist: float = 0.01,
    span: np.ndarray | None = None,
) -> list[np.ndarray]:
    """Up to n_max vectors with loss <= (1+delta)*best_loss, greedily kept
    pairwise at least min_dist apart (RMS of per-dimension span-relative
    differences). The best vector is always included."""
    if len(history) == 0:
        raise EnsembleError("empty history")
    order = sorted(range(len(history)), key=lambda k: history[k][1])
    best_x, best_loss = history[order[0]]
    if not math.isfinite(best_loss):
        return [best_x.copy()]
    threshold = best_loss * (1.0 + delta)
    vectors = np.vstack([history[k][0] for k in order])
    if span is None:
        lo, hi = vectors.min(axis=0), vectors.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
    selected: list[np.ndarray] = []
    for k in order:
        x, ls = history[k]
        if ls > threshold:
            break
        rel = [(x - s) / span for s in selected]
        if selected and min(math.sqrt(float(np.mean(r**2))) for r in rel) < min_dist:
            continue
        selected.append(x.copy())
        if len(selected) >= n_max:
            break
    return selected


def calibrate(
    observed: ObservedSeries,
    config: PopulationConfig,
    bounds: Sequence[tuple[float, float]],
    breakpoints: tuple[int, ...],
    cfg: SwarmConfig,
    fixed_sq_qs: QuarantineSchedule | None = None,
    weights: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
) -> CalibrationResult:
    """Fit the free parameters to a registry series with the novelty swarm.

    `bounds` covers the ten transition rates (RATE_PARAMS order) followed by
    one transmission rate per beta segment."""
    expected = len(RATE_PARAMS) + len(breakpoints) + 1
    if len(bounds) != expected:
        raise EnsembleError(f"expected {expected} bounds, got {len(bounds)}")
    horizon = (observed.dates[0] - config.start_date).days + len(observed) - 1

    def objective(x: np.ndarray) -> float:
        return loss(ParameterVector(x, breakpoints), observed, config, fixed_sq_qs, weights)

    def descriptor(x: np.ndarray) -> np.ndarray:
        return behavioral_descriptor(
            ParameterVector(x, breakpoints), config, fixed_sq_qs, horizon_days=horizon
        )

    return novelty_swarm(objective, bounds, cfg, descriptor=descriptor)


# -- percentile bands ---------------------------------------------------------

BAND_NAMES = tuple(c.upper() for c in COMPARTMENTS)
CENSUS_NAMES = ("h_census", "r_cum")


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per-day, per-series mean and percentile band over an ensemble."""

    start_date: date
    names: tuple[str, ...]
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    probs: tuple[float, float] = (2.5, 97.5)

    def __post_init__(self):
        shape = (self.n_days, len(self.names))
        for attr in ("mean", "lower", "upper"):
            arr = np.asarray(getattr(self, attr), dtype=np.float64)
            object.__setattr__(self, attr, arr)
            if arr.shape != shape:
                raise EnsembleError(f"{attr} has shape {arr.shape}, expected {shape}")
        if np.any(self.lower > self.upper):
            raise EnsembleError("lower band exceeds upper band")

    @property
    def n_days(self) -> int:
        return np.asarray(self.mean).shape[0]

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(self.start_date + timedelta(days=k) for k in range(self.n_days))

    def column(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise EnsembleError(f"series {name!r} not in result") from None

    def series(self, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = self.column(name)
        return self.mean[:, k], self.lower[:, k], self.upper[:, k]

    def restrict(self, names: Sequence[str]) -> "EnsembleResult":
        cols = [self.column(n) for n in names]
        return EnsembleResult(
            start_date=self.start_date,
            names=tuple(names),
            mean=self.mean[:, cols],
            lower=self.lower[:, cols],
            upper=self.upper[:, cols],
            probs=self.probs,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnsembleResult):
            return NotImplemented
        return (
            self.start_date == other.start_date
            and self.names == other.names
            and self.probs == other.probs
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )


def percentile_bands(
    trajectories: Sequence[Trajectory | np.ndarray],
    probs: tuple[float, float] = (2.5, 97.5),
    *,
    start_date: date = date(2020, 1, 1),
    include_census: bool = True,
) -> EnsembleResult:
    """Arithmetic mean and linearly interpolated percentiles (fractional rank
    (n-1)*q/100) per day and series. With include_census, ward census (H+HU)
    and cumulative recovered (R+A) series are banded alongside the ten
    compartments so that census bands are true quantiles of the sums."""
    if len(trajectories) == 0:
        raise EnsembleError("empty ensemble of trajectories")
    if not (len(probs) == 2 and 0 <= probs[0] <= probs[1] <= 100):
        raise EnsembleError(f"probs must be ascending within [0, 100], got {probs}")
    arrays = [t.array if isinstance(t, Trajectory) else np.asarray(t, dtype=np.float64) for t in trajectories]
    length = arrays[0].shape[0]
    if any(a.shape != (length, len(COMPARTMENTS)) for a in arrays):
        raise EnsembleError("trajectories must all have equal length")
    stack = np.stack(arrays)
    names = BAND_NAMES
    if include_census:
        h_census = stack[:, :, _H] + stack[:, :, _HU]
        r_cum = stack[:, :, _R] + stack[:, :, _A]
        stack = np.concatenate([stack, h_census[:, :, None], r_cum[:, :, None]], axis=2)
        names = BAND_NAMES + CENSUS_NAMES
    return EnsembleResult(
        start_date=start_date,
        names=names,
        mean=stack.mean(axis=0),
        lower=np.quantile(stack, probs[0] / 100.0, axis=0),
        upper=np.quantile(stack, probs[1] / 100.0, axis=0),
        probs=tuple(float(p) for p in probs),
    )


def ensemble_bands(
    members: Iterable[ParameterVector],
    config: PopulationConfig,
    horizon_days: int,
    fixed_sq_qs: QuarantineSchedule | None = None,
    probs: tuple[float, float] = (2.5, 97.5),
) -> EnsembleResult:
    """Simulate every parameter vector and band the trajectories."""
    paths = []
    for k, member in enumerate(members):
        path = _simulate_params(member, config, horizon_days, fixed_sq_qs)
        if path is None:
            raise EnsembleError(f"ensemble member {k} is infeasible")
        paths.append(path)
    if not paths:
        raise EnsembleError("empty ensemble")
    return percentile_bands(paths, probs, start_date=config.start_date)


# -- holdout validation -------------------------------------------------------


@dataclass(frozen=True)
class SeriesValidation:
    coverage: float
    rmse: float
    slope_agreement: float


def validate_holdout(result: EnsembleResult, holdout: ObservedSeries) -> dict[str, SeriesValidation]:
    """Compare the band forecast against withheld census observations.

    Returns, per census series, the share of observed points inside the band,
    the RMSE against the band mean, and the fraction of day-to-day slope signs
    the mean curve reproduces."""
    days = [(d - result.start_date).days for d in holdout.dates]
    keep = [k for k, day in enumerate(days) if 0 <= day < result.n_days]
    if not keep:
        raise EnsembleError("holdout dates do not overlap the result")
    idx = np.array([days[k] for k in keep])
    metrics: dict[str, SeriesValidation] = {}
    for name, series_name, obs_all in (
        ("h_census", "h_census", holdout.h_census),
        ("u_census", "U", holdout.u_census),
    ):
        mean, lower, upper = result.series(series_name)
        obs = obs_all[keep]
        mean, lower, upper = mean[idx], lower[idx], upper[idx]
        eps = 1e-9 * np.maximum(1.0, np.abs(obs))  # float-safe band inclusion
        coverage = float(np.mean((obs >= lower - eps) & (obs <= upper + eps)))
        rmse = math.sqrt(float(np.mean((mean - obs) ** 2)))
        if len(obs) >= 2:
            agreement = float(np.mean(np.sign(np.diff(obs)) == np.sign(np.diff(mean))))
        else:
            agreement = 1.0
        metrics[name] = SeriesValidation(coverage=coverage, rmse=rmse, slope_agreement=agreement)
    return metrics
