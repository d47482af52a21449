"""Epidemic ward-load planning: daily compartment model, swarm calibration,
intervention scenarios and forecast bands."""

from .calibration import (
    EnsembleResult,
    ObservedSeries,
    ParameterVector,
    SwarmConfig,
    calibrate,
    novelty_swarm,
    percentile_bands,
    select_ensemble,
    validate_holdout,
)
from .engine import BACKEND
from .model import (
    COMPARTMENTS,
    CompartmentState,
    ParameterSchedule,
    PopulationConfig,
    QuarantineSchedule,
    RateOverride,
    RateSet,
    Trajectory,
    beta_for_r0,
    r0,
    simulate,
    step,
)
from .scenario import (
    InterventionWindow,
    Scenario,
    compile_scenario,
    detect_extrema,
    run_ensemble,
)

__version__ = "0.1.0"
