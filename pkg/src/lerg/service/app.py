"""HTTP surface over one scoring handle.

GET /handshake and POST /score speak the same wire protocol as the
stdio servers, so a running service is itself a valid remote model for
any other client of this package. /explain and /eval wrap the shared
runner and return the exact artifact strings the CLI would write, which
keeps the two surfaces byte-identical for equal configs.

Wire-protocol errors ride in-band as {"id", "error": {...}} replies;
operational errors map to HTTP statuses with a machine-readable body.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..config import ModelSpec, RunConfig
from ..errors import LergError, RemoteUnavailable, ValidationError
from ..evaluation import DEFAULT_RATIOS
from ..models.base import GeneratorHandle, score_batch
from ..models.remote import PROTOCOL_NAME, PROTOCOL_VERSION
from ..report import content_hash_bytes
from ..runner import eval_artifacts, explain_artifacts
from ..segmentation import get_segmenter
from ..types import Example, Method, SegmentedText
from .schemas import (
    ErrorBody,
    EvalReply,
    EvalRequest,
    ExampleBody,
    ExplainReply,
    ExplainRequest,
    HandshakeReply,
    ScoreReply,
    ScoreRequest,
)


def _segment_examples(bodies: list[ExampleBody], segmenter: str) -> list[Example]:
    segment = get_segmenter(segmenter)
    return [
        Example(context=segment(b.context), response=segment(b.response), id=b.id)
        for b in bodies
    ]


def _request_hash(payload) -> str:
    canonical = json.dumps(payload.model_dump(mode="json"), sort_keys=True).encode("utf-8")
    return content_hash_bytes(canonical)


def create_app(handle: GeneratorHandle, model_spec: ModelSpec | None = None) -> FastAPI:
    app = FastAPI(title="lerg scoring and explanation service")
    spec = model_spec or ModelSpec(kind="remote", endpoint="http://in-process")

    @app.exception_handler(LergError)
    async def _lerg_error(_request: Request, exc: LergError):
        status = 502 if isinstance(exc, RemoteUnavailable) else 400
        body = ErrorBody(error=type(exc).__name__, message=str(exc), exit_code=exc.exit_code)
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/handshake", response_model=HandshakeReply)
    async def handshake():
        manifest = handle.manifest
        return HandshakeReply(
            protocol=PROTOCOL_NAME,
            version=PROTOCOL_VERSION,
            normalized=manifest.normalized,
            max_batch=manifest.max_batch,
            model=manifest.description or manifest.kind,
        )

    @app.post("/score")
    async def score_endpoint(request: ScoreRequest):
        try:
            response = SegmentedText.from_segments(request.response)
            rows = score_batch(handle, request.contexts, response)
        except LergError as exc:
            return JSONResponse(
                status_code=200,
                content={
                    "id": request.id,
                    "error": {"code": "bad_request", "message": str(exc)},
                },
            )
        return ScoreReply(id=request.id, logprobs=[list(r.values) for r in rows])

    @app.post("/explain", response_model=ExplainReply)
    async def explain_endpoint(request: ExplainRequest):
        config = _config(request, methods=[request.method])
        [example] = _segment_examples([request.example], request.segmenter)
        artifacts = explain_artifacts(
            handle, example, Method(request.method), config, _request_hash(request)
        )
        return ExplainReply(
            example_id=artifacts.example_id,
            method=artifacts.method.value,
            csv=artifacts.csv,
            json_report=json.loads(artifacts.json),
            svg=artifacts.svg,
        )

    @app.post("/eval", response_model=EvalReply)
    async def eval_endpoint(request: EvalRequest):
        if not handle.manifest.normalized:
            raise ValidationError("eval needs a normalized model")
        config = _config(request, methods=list(request.methods))
        examples = _segment_examples(request.corpus, request.segmenter)
        artifacts = eval_artifacts(handle, examples, config, _request_hash(request))
        return EvalReply(
            csv=artifacts.csv,
            json_report=json.loads(artifacts.json),
            svgs=artifacts.svgs,
        )

    def _config(request, methods: list[str]) -> RunConfig:
        try:
            return RunConfig(
                model=spec,
                methods=methods,
                samples=request.samples,
                max_mask_ratio=request.max_mask_ratio,
                ratios=list(getattr(request, "ratios", None) or DEFAULT_RATIOS),
                seed=request.seed,
                trials=getattr(request, "trials", 10),
                segmenter=request.segmenter,
            )
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    return app
