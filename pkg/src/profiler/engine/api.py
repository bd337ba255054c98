"""HTTP API over the engine, plus static hosting for the web client.

Routes (JSON bodies unless noted):

* ``POST /api/datasets``                multipart upload (file, name, separator, has_header, null_mode)
* ``GET  /api/datasets``                dataset library
* ``GET  /api/datasets/{id}/snippet``   first rows preview
* ``POST /api/datasets/{id}/fixes``     fix decisions -> new revision
* ``POST /api/tasks``                   submit a task spec
* ``GET  /api/tasks/{id}``              task status
* ``GET  /api/tasks/{id}/result``       ?sort=&filter=&page=&page_size=
* ``POST /api/tasks/{id}/cancel``       cooperative cancellation
* ``GET  /api/health``

Error responses always carry a machine-readable code:
``{"error": {"code": "...", "message": "..."}}``.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import pipeline
from ..dataset import NullMode
from ..errors import ProfilerError, ValidationError
from . import Engine

_STATUS_BY_CODE = {
    "VALIDATION_ERROR": 400,
    "MALFORMED_CSV": 400,
    "EMPTY_INPUT": 400,
    "BAD_REGEX": 400,
    "TYPE_MISMATCH": 400,
    "INDEX_OUT_OF_RANGE": 400,
    "EMPTY_TRANSACTIONS": 400,
    "NOT_DOWNWARD_CLOSED": 400,
    "UNKNOWN_DATASET": 404,
    "UNKNOWN_TASK": 404,
    "UNKNOWN_TABLE": 404,
    "UNKNOWN_COLUMN": 404,
    "NOT_FINISHED": 409,
    "ALREADY_FINISHED": 409,
    "STALE_DECISION": 409,
    "CANCELLED": 409,
    "RESOURCE_LIMIT": 500,
    "STORAGE_FULL": 507,
}


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="pattern-profiler", docs_url=None, redoc_url=None)

    @app.exception_handler(ProfilerError)
    async def profiler_error_handler(_request: Request, exc: ProfilerError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 500),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/datasets")
    def list_datasets():
        return {"datasets": [e.to_json() for e in engine.registry.list_entries()]}

    @app.post("/api/datasets", status_code=201)
    async def upload_dataset(
        file: UploadFile = File(...),
        name: Optional[str] = Form(None),
        separator: str = Form(","),
        has_header: str = Form("true"),
        null_mode: str = Form("null-equal"),
    ):
        content = await file.read()
        entry = engine.registry.upload(
            content,
            name=name or (file.filename or "dataset"),
            separator=separator,
            has_header=_parse_bool(has_header, "has_header"),
            null_mode=_parse_null_mode(null_mode),
        )
        return entry.to_json()

    @app.get("/api/datasets/{dataset_id}/snippet")
    def dataset_snippet(dataset_id: str):
        return engine.registry.snippet(dataset_id)

    async def json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception as e:
            raise ValidationError(f"request body is not valid JSON: {e}") from e
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        return body

    @app.post("/api/datasets/{dataset_id}/fixes", status_code=201)
    async def apply_fixes(dataset_id: str, request: Request):
        body = await json_body(request)
        decisions_raw = body.get("decisions")
        if not isinstance(decisions_raw, list) or not decisions_raw:
            raise ValidationError("decisions must be a non-empty list")
        decisions = []
        for d in decisions_raw:
            if not isinstance(d, dict) or "row" not in d or "column" not in d:
                raise ValidationError("each decision needs row and column")
            decisions.append(
                pipeline.FixDecision(
                    row_index=d["row"],
                    column_index=d["column"],
                    replacement=d.get("replacement"),
                    keep=bool(d.get("keep", False)),
                )
            )
        entry = engine.registry.apply_fixes(dataset_id, decisions, name=body.get("name"))
        return entry.to_json()

    @app.post("/api/tasks", status_code=201)
    async def submit_task(request: Request):
        body = await json_body(request)
        task_id = engine.tasks.submit(body)
        return {"task_id": task_id}

    @app.get("/api/tasks/{task_id}")
    def task_status(task_id: str):
        return engine.tasks.status(task_id).to_json()

    @app.get("/api/tasks/{task_id}/result")
    def task_result(
        task_id: str,
        sort: Optional[str] = None,
        filter: Optional[str] = None,
        page: int = 0,
        page_size: int = 50,
    ):
        page_data = engine.tasks.result_page(
            task_id, sort=sort, regex_filter=filter, page=page, page_size=page_size
        )
        return {
            "kind": engine.tasks.result_kind(task_id),
            "summary": engine.tasks.result_summary(task_id),
            **page_data.to_json(),
        }

    @app.post("/api/tasks/{task_id}/cancel")
    def cancel_task(task_id: str):
        return engine.tasks.cancel(task_id).to_json()

    static_dir = engine.config.static_dir
    if static_dir is not None and static_dir.exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webui")

    return app


def _parse_bool(value: str, name: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValidationError(f"{name} must be true or false, got {value!r}")


def _parse_null_mode(value: str) -> NullMode:
    try:
        return NullMode(value)
    except ValueError:
        raise ValidationError(f"unknown null_mode {value!r}") from None
