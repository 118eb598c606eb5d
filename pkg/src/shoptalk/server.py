"""HTTP+JSON API over the annotation TaskStore, plus static UI hosting."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .annotation import TaskStore
from .errors import NotFoundError, ValidationError


def _error(status: int, code: str, message: str, details=None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "details": details or []})


def _status_for(exc: ValidationError) -> tuple[int, str]:
    for d in exc.details if isinstance(exc.details, list) else []:
        if isinstance(d, dict) and d.get("code") == "lease_mismatch":
            return 409, "lease_mismatch"
        if isinstance(d, dict) and d.get("code") == "invalid_state":
            return 409, "invalid_state"
    return 422, "validation_failed"


def create_app(store: TaskStore, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="paraphrase annotation service")

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc), exc.details)

    @app.exception_handler(ValidationError)
    async def _invalid(_req: Request, exc: ValidationError):
        status, code = _status_for(exc)
        return _error(status, code, str(exc), exc.details)

    @app.get("/tasks/next")
    def next_task(worker: str):
        task = store.next_task(worker)
        if task is None:
            return _error(404, "no_open_tasks", "no open tasks remain")
        return task.public_dict()

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str):
        return store.get_task(task_id).public_dict()

    @app.post("/tasks/{task_id}/submit")
    async def submit(task_id: str, request: Request):
        body = await request.json()
        task = store.submit(task_id, body.get("worker_id", ""),
                            list(body.get("paraphrases", [])))
        return {"status": task.state, "task_id": task_id}

    @app.post("/tasks/{task_id}/flag")
    async def flag(task_id: str, request: Request):
        body = await request.json()
        store.flag(task_id, body.get("worker_id", ""), body.get("reason", ""))
        return {"status": "flagged", "task_id": task_id}

    @app.get("/progress")
    def progress():
        return store.progress()

    @app.get("/snapshot/{snapshot_id}/overlay")
    def overlay(snapshot_id: str):
        return store.overlay(snapshot_id)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
