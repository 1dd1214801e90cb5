"""HTTP+JSON layer over ScreeningService.

Errors use one body shape, {code, message, detail}, with 404 for missing
entities, 409 for conflicts, and 422 for validation and training failures.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .corpus import Fragment, SentimentLabel
from .errors import (
    ConflictError,
    NotFoundError,
    ScreeningError,
    TrainingError,
)
from .metrics import report_to_dict
from .service import ScreeningService, TriageStatus


class DocumentPayload(BaseModel):
    raw_text: str
    source: str = "manual"
    origin_ref: str = ""
    title: str | None = None
    id: str | None = None


class DocumentsRequest(BaseModel):
    documents: list[DocumentPayload]


class LabelRequest(BaseModel):
    fragment_id: str
    label: str
    annotator: str


class ScreenRequest(BaseModel):
    fragment_ids: list[str] | None = None
    texts: list[str] | None = None
    classifier: dict | None = None
    screen_id: str | None = None


class DecisionRequest(BaseModel):
    decision: str
    analyst: str


class EvalRunRequest(BaseModel):
    dataset_id: str = "default"
    classifier: dict = Field(default_factory=lambda: {"kind": "baseline", "alpha": 1.0})
    fraction: float = 0.3578
    seed: int


def _error_body(code: str, message: str, detail=None) -> dict:
    return {"code": code, "message": message, "detail": detail}


def _fragment_json(service: ScreeningService, fragment: Fragment) -> dict:
    document = service.corpus.documents.get(fragment.doc_id)
    return {
        "id": fragment.id,
        "doc_id": fragment.doc_id,
        "index": fragment.index,
        "text": fragment.text,
        "lang": fragment.lang.value,
        "label": fragment.label.value if fragment.label else None,
        "predicted": fragment.predicted.to_dict() if fragment.predicted else None,
        "doc_title": document.title if document else None,
        "doc_origin_ref": document.origin_ref if document else None,
    }


def create_app(
    service: ScreeningService,
    token: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="admscreen", version="0.1.0")

    def require_token(authorization: str | None = Header(default=None)):
        if token and authorization != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    guarded = [Depends(require_token)]

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content=_error_body("not_found", str(exc)))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content=_error_body("conflict", str(exc)))

    @app.exception_handler(TrainingError)
    async def _training(request: Request, exc: TrainingError):
        return JSONResponse(status_code=422, content=_error_body("training_error", str(exc)))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content=_error_body("validation", str(exc)))

    @app.exception_handler(ScreeningError)
    async def _domain(request: Request, exc: ScreeningError):
        return JSONResponse(status_code=400, content=_error_body("domain_error", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=_error_body("validation", "request validation failed", exc.errors()),
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/documents", dependencies=guarded)
    def post_documents(request: DocumentsRequest):
        return service.add_documents([d.model_dump() for d in request.documents])

    @app.get("/fragments/{fragment_id}", dependencies=guarded)
    def get_fragment(fragment_id: str):
        return _fragment_json(service, service.get_fragment(fragment_id))

    @app.get("/queue/labeling", dependencies=guarded)
    def labeling_queue(cursor: str | None = None, page_size: int = Query(default=20, le=200)):
        page = service.labeling_queue(cursor=cursor, page_size=page_size)
        return {
            "items": [_fragment_json(service, f) for f in page["items"]],
            "cursor": page["cursor"],
            "total_unlabeled": page["total_unlabeled"],
        }

    @app.post("/labels", dependencies=guarded)
    def post_label(request: LabelRequest):
        label = SentimentLabel(request.label)
        fragment = service.apply_label(request.fragment_id, label, request.annotator)
        return _fragment_json(service, fragment)

    @app.post("/screen", dependencies=guarded)
    def post_screen(request: ScreenRequest):
        outcome = service.screen(
            fragment_ids=request.fragment_ids,
            texts=request.texts,
            classifier_descriptor=request.classifier,
            screen_id=request.screen_id,
        )
        result = outcome["result"]
        return {
            "screen_id": outcome["screen_id"],
            "items": [
                {
                    "fragment_id": item.fragment.id,
                    "text": item.fragment.text,
                    "prediction": item.prediction.to_dict() if item.prediction else None,
                    "error": item.error,
                    "flagged": item.flagged,
                }
                for item in result.items
            ],
            "enqueued": [item.to_dict() for item in outcome["enqueued"]],
        }

    @app.get("/queue/triage", dependencies=guarded)
    def triage_queue(status: str = "pending"):
        wanted = None if status == "all" else TriageStatus(status)
        items = service.triage_queue(wanted)
        payload = []
        for item in items:
            entry = item.to_dict()
            fragment = service.corpus.fragments.get(item.fragment_id)
            if fragment is not None:
                entry["fragment"] = _fragment_json(service, fragment)
            payload.append(entry)
        return {"items": payload}

    @app.post("/triage/{item_id}/decision", dependencies=guarded)
    def post_decision(item_id: str, request: DecisionRequest):
        item = service.record_triage_decision(item_id, request.decision, request.analyst)
        return item.to_dict()

    @app.post("/eval-runs", dependencies=guarded)
    def post_eval_run(request: EvalRunRequest):
        record = service.run_evaluation(
            request.dataset_id, request.classifier, request.fraction, request.seed
        )
        return record.to_dict()

    @app.get("/eval-runs", dependencies=guarded)
    def list_eval_runs():
        return {
            "items": [
                {
                    "run_id": record.run_id,
                    "dataset_id": record.dataset_id,
                    "classifier": record.classifier,
                    "created_at": record.created_at.isoformat(),
                    "accuracy_display": report_to_dict(record.report)["display"]["accuracy"],
                    "partial": record.partial,
                }
                for record in service.runs.values()
            ]
        }

    @app.get("/eval-runs/{run_id}", dependencies=guarded)
    def get_eval_run(run_id: str):
        return service.get_run(run_id).to_dict()

    @app.get("/eval-runs/{run_id}/verify", dependencies=guarded)
    def verify_eval_run(run_id: str):
        return {"run_id": run_id, "consistent": service.verify_run(run_id)}

    @app.get("/annotation-guide")
    def annotation_guide():
        body = resources.files("admscreen").joinpath("data", "annotation_guide.md").read_text(
            "utf-8"
        )
        return {"title": "Annotation guide", "body": body}

    if static_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
