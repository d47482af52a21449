"""JSON document schemas and converters.

Documents exchanged by the CLI, the HTTP service and the planner UI: scenario,
schedule, ensemble artifact and calibration manifest/result. Validation errors
carry the offending field path. Examples live in docs/formats.md.
"""

from __future__ import annotations

from datetime import date
from typing import Any, Sequence

import numpy as np
from jsonschema import Draft202012Validator, FormatChecker

from .calibration import RATE_PARAMS, CalibrationResult, ParameterVector, SwarmConfig
from .errors import SchemaError
from .model import (
    COMPARTMENTS,
    RATE_FIELDS,
    CompartmentState,
    ParameterSchedule,
    PopulationConfig,
    RateOverride,
    RateSet,
)
from .scenario import EFFECT_KINDS, InterventionWindow, Scenario

_RATES_SCHEMA = {
    "type": "object",
    "properties": {name: {"type": "number"} for name in RATE_FIELDS},
    "required": ["beta"],
    "additionalProperties": False,
}

_STATE_SCHEMA = {
    "type": "object",
    "properties": {name: {"type": "number", "minimum": 0} for name in COMPARTMENTS},
    "required": list(COMPARTMENTS),
    "additionalProperties": False,
}

POPULATION_SCHEMA = {
    "type": "object",
    "properties": {
        "p_total": {"type": "number", "exclusiveMinimum": 0},
        "start_date": {"type": "string", "format": "date"},
        "initial_state": _STATE_SCHEMA,
    },
    "required": ["p_total", "start_date", "initial_state"],
    "additionalProperties": False,
}

_WINDOW_SCHEMA = {
    "type": "object",
    "properties": {
        "start_date": {"type": "string", "format": "date"},
        "duration_days": {"type": "integer", "minimum": 1},
        "effect": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(EFFECT_KINDS)},
                "value": {"type": "number"},
            },
            "required": ["kind", "value"],
            "additionalProperties": False,
        },
    },
    "required": ["start_date", "duration_days", "effect"],
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "$id": "epiward/scenario",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "population": POPULATION_SCHEMA,
        "base_rates": _RATES_SCHEMA,
        "windows": {"type": "array", "items": _WINDOW_SCHEMA},
        "horizon_days": {"type": "integer", "minimum": 1},
        "release_rt": {"type": "number", "minimum": 0},
    },
    "required": ["name", "population", "base_rates", "windows", "horizon_days", "release_rt"],
    "additionalProperties": False,
}

SCHEDULE_SCHEMA = {
    "$id": "epiward/schedule",
    "type": "object",
    "properties": {
        "base": _RATES_SCHEMA,
        "overrides": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "day_from": {"type": "integer", "minimum": 0},
                    "day_to": {"type": "integer", "minimum": 0},
                    "rates": {
                        "type": "object",
                        "properties": {name: {"type": "number"} for name in RATE_FIELDS},
                        "additionalProperties": False,
                    },
                },
                "required": ["day_from", "day_to", "rates"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["base"],
    "additionalProperties": False,
}

ENSEMBLE_SCHEMA = {
    "$id": "epiward/ensemble",
    "type": "object",
    "properties": {
        "kind": {"const": "ensemble"},
        "name": {"type": "string"},
        "members": {"type": "array", "items": _RATES_SCHEMA, "minItems": 1},
    },
    "required": ["kind", "members"],
    "additionalProperties": False,
}

_BOUND_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

MANIFEST_SCHEMA = {
    "$id": "epiward/calibration-manifest",
    "type": "object",
    "properties": {
        "population": POPULATION_SCHEMA,
        "beta_breakpoints": {
            "type": "array",
            "items": {"type": "string", "format": "date"},
        },
        "bounds": {
            "type": "object",
            "properties": {
                **{name: _BOUND_PAIR for name in RATE_PARAMS},
                "beta": {"type": "array", "items": _BOUND_PAIR, "minItems": 1},
            },
            "required": [*RATE_PARAMS, "beta"],
            "additionalProperties": False,
        },
        "swarm": {
            "type": "object",
            "properties": {
                "n_particles": {"type": "integer", "minimum": 2},
                "n_iterations": {"type": "integer", "minimum": 1},
                "w": {"type": "number"},
                "c1": {"type": "number"},
                "c2": {"type": "number"},
                "novelty_weight": {"type": "number", "minimum": 0, "maximum": 1},
                "archive_k": {"type": "integer", "minimum": 1},
                "rng_seed": {"type": "integer"},
                "workers": {"type": "integer", "minimum": 1},
                "stall_patience": {"type": "integer", "minimum": 1},
                "kick_scale": {"type": "number", "minimum": 0},
                "ensemble_delta": {"type": "number", "minimum": 0},
                "ensemble_max": {"type": "integer", "minimum": 1},
                "ensemble_min_dist": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "loss_weights": {
            "type": "array",
            "items": {"type": "number", "minimum": 0},
            "minItems": 4,
            "maxItems": 4,
        },
        "smoothing_days": {"type": "integer", "minimum": 1},
        "observed": {"type": "string"},
        "mobility": {"type": "string"},
    },
    "required": ["population", "bounds"],
    "additionalProperties": False,
}

_format_checker = FormatChecker()


def validate_document(doc: Any, schema: dict) -> None:
    """Raise SchemaError naming the first offending field."""
    validator = Draft202012Validator(schema, format_checker=_format_checker)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), str(e.absolute_path)))
    if not errors:
        return
    err = errors[0]
    path = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = err.message.split("'")[1]
        path.append(missing)
    raise SchemaError(err.message, field_path=".".join(path))


# -- converters ---------------------------------------------------------------


def rates_from_dict(doc: dict) -> RateSet:
    return RateSet(**{k: float(v) for k, v in doc.items()})


def rates_to_dict(rates: RateSet) -> dict:
    return {name: getattr(rates, name) for name in RATE_FIELDS}


def population_from_dict(doc: dict) -> PopulationConfig:
    state = CompartmentState(**{k: float(v) for k, v in doc["initial_state"].items()})
    return PopulationConfig(
        p_total=float(doc["p_total"]),
        start_date=date.fromisoformat(doc["start_date"]),
        initial_state=state,
    )


def population_to_dict(config: PopulationConfig) -> dict:
    return {
        "p_total": config.p_total,
        "start_date": config.start_date.isoformat(),
        "initial_state": {name: getattr(config.initial_state, name) for name in COMPARTMENTS},
    }


def scenario_from_dict(doc: dict) -> Scenario:
    validate_document(doc, SCENARIO_SCHEMA)
    windows = tuple(
        InterventionWindow(
            start_date=date.fromisoformat(w["start_date"]),
            duration_days=int(w["duration_days"]),
            effect_kind=w["effect"]["kind"],
            effect_value=float(w["effect"]["value"]),
        )
        for w in doc["windows"]
    )
    return Scenario(
        name=doc["name"],
        config=population_from_dict(doc["population"]),
        base_rates=rates_from_dict(doc["base_rates"]),
        windows=windows,
        horizon_days=int(doc["horizon_days"]),
        release_rt=float(doc["release_rt"]),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "population": population_to_dict(scenario.config),
        "base_rates": rates_to_dict(scenario.base_rates),
        "windows": [
            {
                "start_date": w.start_date.isoformat(),
                "duration_days": w.duration_days,
                "effect": {"kind": w.effect_kind, "value": w.effect_value},
            }
            for w in scenario.windows
        ],
        "horizon_days": scenario.horizon_days,
        "release_rt": scenario.release_rt,
    }


def schedule_from_dict(doc: dict) -> ParameterSchedule:
    validate_document(doc, SCHEDULE_SCHEMA)
    overrides = tuple(
        RateOverride(
            day_from=int(o["day_from"]),
            day_to=int(o["day_to"]),
            rates={k: float(v) for k, v in o["rates"].items()},
        )
        for o in doc.get("overrides", [])
    )
    return ParameterSchedule(base=rates_from_dict(doc["base"]), overrides=overrides)


def ensemble_from_dict(doc: dict) -> list[RateSet]:
    validate_document(doc, ENSEMBLE_SCHEMA)
    return [rates_from_dict(m) for m in doc["members"]]


def ensemble_to_dict(members: Sequence[RateSet], name: str = "") -> dict:
    doc = {"kind": "ensemble", "members": [rates_to_dict(m) for m in members]}
    if name:
        doc["name"] = name
    return doc


def manifest_swarm_config(doc: dict) -> SwarmConfig:
    return SwarmConfig(**doc.get("swarm", {}))


def manifest_bounds(doc: dict) -> list[tuple[float, float]]:
    bounds_doc = doc["bounds"]
    bounds = [tuple(float(v) for v in bounds_doc[name]) for name in RATE_PARAMS]
    bounds += [tuple(float(v) for v in pair) for pair in bounds_doc["beta"]]
    return bounds


def manifest_breakpoint_days(doc: dict, start: date) -> tuple[int, ...]:
    days = tuple(
        (date.fromisoformat(stamp) - start).days for stamp in doc.get("beta_breakpoints", [])
    )
    if any(d <= 0 for d in days):
        raise SchemaError(
            "beta_breakpoints must fall after the population start_date",
            field_path="beta_breakpoints",
        )
    n_beta = len(doc["bounds"]["beta"])
    if n_beta != len(days) + 1:
        raise SchemaError(
            f"bounds.beta has {n_beta} segments for {len(days)} breakpoints",
            field_path="bounds.beta",
        )
    return days


def calibration_result_to_dict(
    result: CalibrationResult, breakpoints: tuple[int, ...], manifest: dict
) -> dict:
    return {
        "kind": "calibration",
        "best": {"values": [float(v) for v in result.best], "breakpoints": list(breakpoints)},
        "best_loss": result.best_loss,
        "ensemble": [[float(v) for v in vec] for vec in result.ensemble],
        "loss_history": [float(v) for v in result.loss_history],
        "manifest": manifest,
    }


def calibration_result_from_dict(doc: dict) -> tuple[ParameterVector, list[ParameterVector]]:
    breakpoints = tuple(int(b) for b in doc["best"]["breakpoints"])
    best = ParameterVector(np.array(doc["best"]["values"]), breakpoints)
    ensemble = [ParameterVector(np.array(vec), breakpoints) for vec in doc["ensemble"]]
    return best, ensemble
