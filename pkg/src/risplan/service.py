"""Local HTTP service for scene management and map computation.

In-memory persistence (optionally snapshotting scene documents to a state
directory); compute jobs run on a worker pool and never mutate scenes.
Jobs are stamped with the scene revision they were computed from so maps
from different RIS placements cannot be compared by accident.
"""
from __future__ import annotations

import itertools
import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import mapper
from .errors import RisPlanError, SceneInvariantError, SceneSchemaError, SceneSyntaxError
from .scene import (Scene, parse_scene, scene_document, validate_scene,
                    with_ris, _parse_ris)


@dataclass
class SceneRecord:
    scene: Scene
    revision: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class Job:
    id: str
    scene_id: str
    revision: int
    variant: str
    state: str = "queued"           # queued | running | done | failed
    progress: float = 0.0
    result: Optional[mapper.CoverageMap] = None
    error: Optional[str] = None


def _error(status: int, code: str, message: str, **details) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message,
                                 "details": details})


def _cell_json(c: mapper.CellRecord) -> dict:
    def num(v):
        if v is None or not math.isfinite(v):
            return None
        return float(f"{v:.6f}")   # mirror the CSV's 6-decimal values exactly
    return {"x_m": num(c.x_m), "y_m": num(c.y_m), "z_m": num(c.z_m),
            "gain_db": num(c.gain_db), "ue_ris_power_db": num(c.ue_ris_power_db),
            "p_target_dbm": num(c.p_target_dbm), "p_tx_dbm": num(c.p_tx_dbm),
            "status": c.status.value}


def create_app(state_dir: str | None = None, ui_dir: str | None = None,
               workers: int = 2, map_threads: int | None = None) -> FastAPI:
    app = FastAPI(title="risplan service")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    scenes: dict[str, SceneRecord] = {}
    jobs: dict[str, Job] = {}
    active: dict[tuple[str, int, str], str] = {}   # (scene, revision, variant) -> job id
    registry_lock = threading.Lock()
    counter = itertools.count(1)
    executor = ThreadPoolExecutor(max_workers=workers)

    if state_dir:
        os.makedirs(state_dir, exist_ok=True)
        for name in sorted(os.listdir(state_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(state_dir, name), encoding="utf-8") as fh:
                try:
                    scene = parse_scene(fh.read())
                except RisPlanError:
                    continue
            scenes[name[:-5]] = SceneRecord(scene=scene)

    def snapshot(scene_id: str, scene: Scene) -> None:
        if not state_dir:
            return
        path = os.path.join(state_dir, f"{scene_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(scene_document(scene), fh, indent=2)

    def run_job(job: Job, scene: Scene) -> None:
        job.state = "running"
        def on_progress(done: int, total: int) -> None:
            job.progress = max(job.progress, done / total)
        try:
            result = mapper.compute_map(scene, job.variant, threads=map_threads,
                                        progress=on_progress)
        except Exception as exc:   # computation failures surface via the job
            job.state = "failed"
            job.error = str(exc)
            return
        job.result = result
        job.progress = 1.0
        job.state = "done"

    @app.post("/api/scenes", status_code=201)
    async def create_scene(request: Request):
        body = await request.body()
        try:
            scene = parse_scene(body.decode("utf-8"))
        except SceneSyntaxError as exc:
            return _error(400, exc.code, str(exc), line=exc.line, column=exc.column)
        except SceneSchemaError as exc:
            return _error(400, exc.code, str(exc), path=exc.path)
        except SceneInvariantError as exc:
            return _error(400, exc.code, str(exc), issues=[
                {"severity": i.severity, "code": i.code, "message": i.message}
                for i in exc.issues])
        with registry_lock:
            scene_id = f"s{next(counter)}"
            scenes[scene_id] = SceneRecord(scene=scene)
        snapshot(scene_id, scene)
        return {"scene_id": scene_id, "revision": 1}

    @app.get("/api/scenes/{scene_id}")
    def get_scene(scene_id: str):
        rec = scenes.get(scene_id)
        if rec is None:
            return _error(404, "SCENE_NOT_FOUND", f"unknown scene {scene_id}")
        return {"scene_id": scene_id, "revision": rec.revision,
                "scene": scene_document(rec.scene)}

    @app.put("/api/scenes/{scene_id}/ris")
    async def update_ris(scene_id: str, request: Request):
        rec = scenes.get(scene_id)
        if rec is None:
            return _error(404, "SCENE_NOT_FOUND", f"unknown scene {scene_id}")
        body = await request.body()
        try:
            data = json.loads(body.decode("utf-8") or "null")
        except json.JSONDecodeError as exc:
            return _error(400, "SYNTAX", exc.msg, line=exc.lineno, column=exc.colno)
        if data is None:
            ris = None
        else:
            try:
                ris = _parse_ris(data, "$.ris")
            except SceneSchemaError as exc:
                return _error(400, exc.code, str(exc), path=exc.path)
        candidate = with_ris(rec.scene, ris)
        issues = [i for i in validate_scene(candidate) if i.severity == "error"]
        if issues:
            return _error(400, "INVARIANT", "invalid RIS placement", issues=[
                {"severity": i.severity, "code": i.code, "message": i.message}
                for i in issues])
        with rec.lock:
            rec.scene = candidate
            rec.revision += 1
            revision = rec.revision
        snapshot(scene_id, candidate)
        return {"scene_id": scene_id, "revision": revision}

    @app.post("/api/scenes/{scene_id}/compute", status_code=202)
    def start_compute(scene_id: str, variant: str):
        rec = scenes.get(scene_id)
        if rec is None:
            return _error(404, "SCENE_NOT_FOUND", f"unknown scene {scene_id}")
        if variant not in ("baseline", "with_ris"):
            return _error(400, "BAD_VARIANT", f"unknown variant {variant!r}")
        with rec.lock:
            scene = rec.scene
            revision = rec.revision
        if variant == "with_ris" and scene.ris is None:
            return _error(409, "RIS_ABSENT", "scene has no RIS")
        key = (scene_id, revision, variant)
        with registry_lock:
            existing = active.get(key)
            if existing is not None and jobs[existing].state != "failed":
                return {"job_id": existing, "revision": revision}
            job_id = f"j{next(counter)}"
            job = Job(id=job_id, scene_id=scene_id, revision=revision,
                      variant=variant)
            jobs[job_id] = job
            active[key] = job_id
        executor.submit(run_job, job, scene)
        return {"job_id": job_id, "revision": revision}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "JOB_NOT_FOUND", f"unknown job {job_id}")
        out = {"job_id": job.id, "scene_id": job.scene_id,
               "revision": job.revision, "variant": job.variant,
               "state": job.state, "progress": job.progress}
        if job.error:
            out["error"] = job.error
        return out

    @app.get("/api/jobs/{job_id}/map")
    def get_map(job_id: str, request: Request):
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "JOB_NOT_FOUND", f"unknown job {job_id}")
        if job.state != "done":
            return _error(409, "JOB_NOT_DONE", f"job is {job.state}")
        accept = request.headers.get("accept", "")
        if "application/json" in accept:
            g = job.result.grid
            return {"variant": job.result.variant,
                    "grid": {"x_min": g.x_min, "x_max": g.x_max,
                             "y_min": g.y_min, "y_max": g.y_max,
                             "step_m": g.step_m, "height_m": g.height_m,
                             "shape": list(g.shape)},
                    "cells": [_cell_json(c) for c in job.result.cells]}
        return Response(content=mapper.export_map_csv(job.result),
                        media_type="text/csv")

    @app.get("/api/classify")
    def get_classification(baseline: str, variant: str, request: Request,
                           epsilon_db: float = mapper.REDUCTION_EPSILON_DB):
        jb, jv = jobs.get(baseline), jobs.get(variant)
        if jb is None or jv is None:
            return _error(404, "JOB_NOT_FOUND", "unknown job id")
        for j in (jb, jv):
            if j.state != "done":
                return _error(409, "JOB_NOT_DONE", f"job {j.id} is {j.state}")
        if jb.scene_id != jv.scene_id or jb.revision != jv.revision:
            return _error(422, "REVISION_MISMATCH",
                          "jobs come from different scenes or revisions",
                          baseline_revision=jb.revision,
                          variant_revision=jv.revision)
        cmap = mapper.classify(jb.result, jv.result, epsilon_db=epsilon_db)
        accept = request.headers.get("accept", "")
        if "text/csv" in accept:
            return Response(content=mapper.export_classification_csv(cmap),
                            media_type="text/csv")
        return {
            "summary": mapper.map_summary(cmap),
            "cells": [{"x_m": c.x_m, "y_m": c.y_m, "z_m": c.z_m,
                       "category": c.category,
                       "reduction_db": None if c.reduction_db is None
                       else float(f"{c.reduction_db:.6f}")}
                      for c in cmap.cells],
        }

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
