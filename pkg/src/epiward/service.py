"""HTTP job service for scenario and calibration runs.

Single process: requests are validated synchronously, queued onto a bounded
worker pool and polled by id. Result artifacts are files under a
content-addressed results directory, so identical submissions resolve to the
same artifact bytes and finished jobs survive restarts (queued ones are marked
failed on startup).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .calibration import calibrate, ensemble_bands
from .dataio import (
    derive_quarantine_schedule,
    parse_mobility_csv,
    parse_observed_csv,
    write_bands_csv,
)
from .errors import EpiwardError, SchemaError, UnknownArtifactError
from .scenario import detect_extrema, run_ensemble
from . import schemas

JOB_KINDS = ("scenario", "calibration")
JOB_STATES = ("queued", "running", "done", "failed")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _canonical(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


@dataclass
class Job:
    id: str
    kind: str
    state: str = "queued"
    submitted_at: str = field(default_factory=_now)
    finished_at: str | None = None
    result_ref: str | None = None
    error: str | None = None

    def snapshot(self) -> dict:
        return asdict(self)


class JobStore:
    """In-memory job table backed by one JSON file per job."""

    def __init__(self, data_dir: Path, workers: int | None = None):
        self.data_dir = data_dir
        self.jobs_dir = data_dir / "jobs"
        self.results_dir = data_dir / "results"
        self.ensembles_dir = data_dir / "ensembles"
        for path in (self.jobs_dir, self.results_dir, self.ensembles_dir):
            path.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._pool = ThreadPoolExecutor(max_workers=workers or os.cpu_count() or 2)
        self._recover()

    def _recover(self) -> None:
        for path in sorted(self.jobs_dir.glob("*.json")):
            record = json.loads(path.read_text(encoding="utf-8"))
            job = Job(**record)
            if job.state in ("queued", "running"):
                job.state = "failed"
                job.error = "restarted"
                job.finished_at = _now()
                self._persist(job)
            self._jobs[job.id] = job

    def _persist(self, job: Job) -> None:
        path = self.jobs_dir / f"{job.id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(_dump_json(job.snapshot()), encoding="utf-8")
        os.replace(tmp, path)

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def submit(self, kind: str, runner: Callable[[], str]) -> Job:
        job = Job(id=uuid.uuid4().hex, kind=kind)
        with self._lock:
            self._jobs[job.id] = job
            self._persist(job)

        def execute() -> None:
            with self._lock:
                job.state = "running"
                self._persist(job)
            try:
                ref = runner()
            except Exception as exc:  # worker failures land in the job record
                with self._lock:
                    job.state = "failed"
                    job.error = str(exc)
                    job.finished_at = _now()
                    self._persist(job)
                return
            with self._lock:
                job.state = "done"
                job.result_ref = ref
                job.finished_at = _now()
                self._persist(job)

        self._pool.submit(execute)
        return job

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)


class ScenarioRunRequest(BaseModel):
    scenario: dict
    ensemble: str


class CalibrationRequest(BaseModel):
    manifest: dict
    observed_csv: str
    mobility_csv: str | None = None


class EnsembleUpload(BaseModel):
    name: str = ""
    members: list[dict]


def create_app(data_dir: Path, workers: int | None = None) -> FastAPI:
    store = JobStore(Path(data_dir), workers=workers)
    app = FastAPI(title="epiward", version="0.1.0")
    app.state.store = store

    def error_body(code: str, message: str, field_path: str | None = None) -> dict:
        body = {"code": code, "message": message}
        if field_path:
            body["field_path"] = field_path
        return body

    @app.exception_handler(SchemaError)
    async def schema_error(_: Request, exc: SchemaError):
        return JSONResponse(
            status_code=400,
            content=error_body("schema_invalid", str(exc), exc.field_path or None),
        )

    @app.exception_handler(UnknownArtifactError)
    async def unknown_artifact(_: Request, exc: UnknownArtifactError):
        return JSONResponse(status_code=404, content=error_body("unknown_artifact", str(exc)))

    @app.exception_handler(EpiwardError)
    async def domain_error(_: Request, exc: EpiwardError):
        return JSONResponse(status_code=400, content=error_body("invalid_input", str(exc)))

    def resolve_ensemble(ref: str) -> list:
        path = (store.data_dir / ref).resolve()
        if not str(path).startswith(str(store.data_dir.resolve())) or not path.is_file():
            raise UnknownArtifactError(f"no ensemble artifact at {ref!r}")
        return schemas.ensemble_from_dict(json.loads(path.read_text(encoding="utf-8")))

    def result_path(payload) -> tuple[Path, str]:
        digest = hashlib.sha256(_canonical(payload)).hexdigest()[:16]
        ref = f"results/{digest}"
        return store.data_dir / ref, ref

    def write_artifact(directory: Path, name: str, data: bytes) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        tmp = directory / f".{name}.{uuid.uuid4().hex}.tmp"
        tmp.write_bytes(data)
        os.replace(tmp, directory / name)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/api/v1/scenarios/run", status_code=202)
    def submit_scenario(request: ScenarioRunRequest):
        scenario = schemas.scenario_from_dict(request.scenario)  # 400 on schema errors
        members = resolve_ensemble(request.ensemble)
        directory, ref = result_path({"scenario": request.scenario, "ensemble": request.ensemble})

        def runner() -> str:
            if not (directory / "bands.csv").exists() or not (directory / "extrema.json").exists():
                result = run_ensemble(scenario, members)
                report = detect_extrema(result)
                write_artifact(directory, "bands.csv", write_bands_csv(result))
                write_artifact(
                    directory,
                    "extrema.json",
                    _dump_json(_report_doc(report)).encode("utf-8"),
                )
            return ref

        return store.submit("scenario", runner).snapshot()

    @app.post("/api/v1/calibrations", status_code=202)
    def submit_calibration(request: CalibrationRequest):
        manifest = request.manifest
        schemas.validate_document(manifest, schemas.MANIFEST_SCHEMA)
        observed = parse_observed_csv(request.observed_csv.encode("utf-8"))
        config = schemas.population_from_dict(manifest["population"])
        fixed = None
        if request.mobility_csv:
            mobility = parse_mobility_csv(request.mobility_csv.encode("utf-8"))
            fixed = derive_quarantine_schedule(
                mobility, smoothing_days=manifest.get("smoothing_days", 7)
            )
        bounds = schemas.manifest_bounds(manifest)
        breakpoints = schemas.manifest_breakpoint_days(manifest, config.start_date)
        cfg = schemas.manifest_swarm_config(manifest)
        weights = tuple(manifest.get("loss_weights", (1.0, 1.0, 1.0, 1.0)))
        payload = {
            "manifest": manifest,
            "observed_csv": request.observed_csv,
            "mobility_csv": request.mobility_csv,
        }
        directory, ref = result_path(payload)

        def runner() -> str:
            if not (directory / "ensemble.json").exists():
                result = calibrate(observed, config, bounds, breakpoints, cfg, fixed, weights)
                result_doc = schemas.calibration_result_to_dict(result, breakpoints, manifest)
                _, ensemble = schemas.calibration_result_from_dict(result_doc)
                members = [vec.to_rate_set() for vec in ensemble]
                horizon = (observed.dates[-1] - config.start_date).days
                bands = ensemble_bands(ensemble, config, horizon, fixed)
                write_artifact(
                    directory, "calibration.json", _dump_json(result_doc).encode("utf-8")
                )
                ensemble_doc = schemas.ensemble_to_dict(members, name=directory.name)
                write_artifact(
                    directory, "ensemble.json", _dump_json(ensemble_doc).encode("utf-8")
                )
                write_artifact(directory, "bands.csv", write_bands_csv(bands))
                write_artifact(
                    store.ensembles_dir,
                    f"{directory.name}.json",
                    _dump_json(ensemble_doc).encode("utf-8"),
                )
            return ref

        return store.submit("calibration", runner).snapshot()

    @app.get("/api/v1/jobs/{job_id}")
    def poll_job(job_id: str):
        job = store.get(job_id)
        if job is None:
            return JSONResponse(
                status_code=404, content=error_body("not_found", f"no job {job_id!r}")
            )
        return job.snapshot()

    def _job_artifact(job_id: str, name: str):
        job = store.get(job_id)
        if job is None:
            return None, JSONResponse(
                status_code=404, content=error_body("not_found", f"no job {job_id!r}")
            )
        if job.state != "done" or job.result_ref is None:
            return None, JSONResponse(
                status_code=409,
                content=error_body("not_ready", f"job {job_id} is {job.state}"),
            )
        path = store.data_dir / job.result_ref / name
        if not path.is_file():
            return None, JSONResponse(
                status_code=404, content=error_body("not_found", f"{name} missing")
            )
        return path, None

    @app.get("/api/v1/jobs/{job_id}/bands")
    def job_bands(job_id: str):
        path, failure = _job_artifact(job_id, "bands.csv")
        if failure is not None:
            return failure
        return Response(content=path.read_bytes(), media_type="text/csv")

    @app.get("/api/v1/jobs/{job_id}/extrema")
    def job_extrema(job_id: str):
        path, failure = _job_artifact(job_id, "extrema.json")
        if failure is not None:
            return failure
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.get("/api/v1/ensembles")
    def list_ensembles():
        items = []
        for path in sorted(store.ensembles_dir.glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            items.append(
                {
                    "ref": f"ensembles/{path.name}",
                    "name": doc.get("name", path.stem),
                    "members": len(doc.get("members", [])),
                }
            )
        return {"ensembles": items}

    @app.post("/api/v1/ensembles", status_code=201)
    def upload_ensemble(request: EnsembleUpload):
        doc = {"kind": "ensemble", "members": request.members}
        if request.name:
            doc["name"] = request.name
        members = schemas.ensemble_from_dict(doc)  # 400 on invalid members
        digest = hashlib.sha256(_canonical(doc)).hexdigest()[:16]
        name = f"{digest}.json"
        path = store.ensembles_dir / name
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_text(_dump_json(doc), encoding="utf-8")
            os.replace(tmp, path)
        return {"ref": f"ensembles/{name}", "members": len(members)}

    return app


def _report_doc(report) -> dict:
    return {
        "entries": [
            {
                "date": e.date.isoformat(),
                "series": e.series,
                "kind": e.kind,
                "mean": e.mean,
                "ci_low": e.ci_low,
                "ci_high": e.ci_high,
            }
            for e in report.entries
        ]
    }
