"""Batch command-line interface.

Subcommands cover single simulations, registry calibration, scenario ensemble
runs, holdout validation, extrema tables and serving the HTTP API. Exit codes:
0 success, 2 input validation failure, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .calibration import calibrate, ensemble_bands, validate_holdout
from .dataio import (
    derive_quarantine_schedule,
    parse_bands_csv,
    parse_mobility_csv,
    parse_observed_csv,
    write_bands_csv,
    write_trajectory_csv,
)
from .errors import EpiwardError, SchemaError, SimulationDayError
from .model import simulate
from .scenario import detect_extrema, run_ensemble
from . import schemas

VALIDATION_EXIT = 2
RUNTIME_EXIT = 1


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}")


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}")


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _extrema_doc(report) -> dict:
    return {"entries": [
        {
            "date": e.date.isoformat(),
            "series": e.series,
            "kind": e.kind,
            "mean": e.mean,
            "ci_low": e.ci_low,
            "ci_high": e.ci_high,
        }
        for e in report.entries
    ]}


def cmd_simulate(args) -> int:
    population = _read_json(args.config)
    schemas.validate_document(population, schemas.POPULATION_SCHEMA)
    config = schemas.population_from_dict(population)
    schedule = schemas.schedule_from_dict(_read_json(args.schedule))
    trajectory = simulate(config, schedule, args.horizon)
    Path(args.out).write_bytes(write_trajectory_csv(trajectory, config.start_date))
    print(f"wrote {args.out}: {len(trajectory)} days")
    return 0


def cmd_calibrate(args) -> int:
    manifest = _read_json(args.manifest)
    schemas.validate_document(manifest, schemas.MANIFEST_SCHEMA)
    observed = parse_observed_csv(_read_bytes(args.observed))
    config = schemas.population_from_dict(manifest["population"])
    fixed_sq_qs = None
    if args.mobility:
        mobility = parse_mobility_csv(_read_bytes(args.mobility))
        fixed_sq_qs = derive_quarantine_schedule(
            mobility, smoothing_days=manifest.get("smoothing_days", 7)
        )
    bounds = schemas.manifest_bounds(manifest)
    breakpoints = schemas.manifest_breakpoint_days(manifest, config.start_date)
    cfg = schemas.manifest_swarm_config(manifest)
    weights = tuple(manifest.get("loss_weights", (1.0, 1.0, 1.0, 1.0)))

    result = calibrate(observed, config, bounds, breakpoints, cfg, fixed_sq_qs, weights)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result_doc = schemas.calibration_result_to_dict(result, breakpoints, manifest)
    (out / "calibration.json").write_text(_dump_json(result_doc), encoding="utf-8")

    best, ensemble = schemas.calibration_result_from_dict(result_doc)
    members = [vec.to_rate_set() for vec in ensemble]
    ensemble_doc = schemas.ensemble_to_dict(members, name=out.name)
    (out / "ensemble.json").write_text(_dump_json(ensemble_doc), encoding="utf-8")

    horizon = (observed.dates[-1] - config.start_date).days
    bands = ensemble_bands(ensemble, config, horizon, fixed_sq_qs)
    (out / "bands.csv").write_bytes(write_bands_csv(bands))
    print(
        f"best loss {result.best_loss:.6f} after {len(result.loss_history) - 1} iterations; "
        f"ensemble of {len(result.ensemble)}; artifacts in {out}"
    )
    return 0


def cmd_scenario_run(args) -> int:
    scenario = schemas.scenario_from_dict(_read_json(args.scenario))
    members = schemas.ensemble_from_dict(_read_json(args.ensemble))
    result = run_ensemble(scenario, members)
    report = detect_extrema(result)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bands.csv").write_bytes(write_bands_csv(result))
    (out / "extrema.json").write_text(_dump_json(_extrema_doc(report)), encoding="utf-8")
    print(f"scenario {scenario.name!r}: {result.n_days} days, "
          f"{len(report.entries)} extrema; artifacts in {out}")
    return 0


def cmd_validate(args) -> int:
    bands = parse_bands_csv(_read_bytes(args.bands))
    holdout = parse_observed_csv(_read_bytes(args.holdout))
    metrics = validate_holdout(bands, holdout)
    print(_dump_json({name: asdict(m) for name, m in metrics.items()}), end="")
    return 0


def cmd_extrema(args) -> int:
    bands = parse_bands_csv(_read_bytes(args.bands))
    report = detect_extrema(
        bands,
        min_separation_days=args.separation,
        min_prominence=args.prominence,
    )
    if args.format == "json":
        print(_dump_json(_extrema_doc(report)), end="")
    else:
        for e in report.entries:
            triple = f"{e.mean:,.0f} ({e.ci_low:,.0f}-{e.ci_high:,.0f})"
            print(f"{e.date.isoformat()}  {e.series:9s}  {e.kind:6s}  {triple}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epiward", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one schedule and write a trajectory CSV")
    p.add_argument("--config", required=True, help="population JSON")
    p.add_argument("--schedule", required=True, help="schedule JSON")
    p.add_argument("--horizon", required=True, type=int, help="days to simulate")
    p.add_argument("--out", required=True, help="output trajectory CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="fit parameters to a registry CSV")
    p.add_argument("--observed", required=True, help="observed registry CSV")
    p.add_argument("--mobility", help="mobility CSV for the fixed s_q/q_s schedule")
    p.add_argument("--manifest", required=True, help="calibration manifest JSON")
    p.add_argument("--out", required=True, help="output artifact directory")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("scenario", help="scenario operations")
    scen_sub = p.add_subparsers(dest="scenario_command", required=True)
    p = scen_sub.add_parser("run", help="run an intervention scenario over an ensemble")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--ensemble", required=True, help="ensemble artifact JSON")
    p.add_argument("--out", required=True, help="output artifact directory")
    p.set_defaults(func=cmd_scenario_run)

    p = sub.add_parser("validate", help="score a band forecast against holdout data")
    p.add_argument("--bands", required=True, help="bands CSV")
    p.add_argument("--holdout", required=True, help="withheld registry CSV")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extrema", help="peak/valley table from a bands CSV")
    p.add_argument("--bands", required=True, help="bands CSV")
    p.add_argument("--separation", type=int, default=7, help="minimum days between extrema")
    p.add_argument("--prominence", type=float, default=None,
                   help="absolute prominence threshold (default: 2%% of series max)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_extrema)

    p = sub.add_parser("serve", help="serve the HTTP job API")
    p.add_argument("--data-dir", required=True, help="artifact and job store directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8040)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimulationDayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except EpiwardError as exc:
        kind = "invalid input" if isinstance(exc, ValueError) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return VALIDATION_EXIT if isinstance(exc, ValueError) else RUNTIME_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
