"""Request/response bodies for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..evaluation import DEFAULT_RATIOS


class ScoreRequest(BaseModel):
    """Wire-protocol scoring request: several candidate contexts, one
    response, per-step log-probabilities back."""

    id: str
    contexts: list[list[str]]
    response: list[str]


class ScoreReply(BaseModel):
    id: str
    logprobs: list[list[float]]


class WireError(BaseModel):
    code: str
    message: str


class ScoreErrorReply(BaseModel):
    id: str
    error: WireError


class HandshakeReply(BaseModel):
    protocol: str
    version: int
    normalized: bool
    max_batch: int
    model: str


class ExampleBody(BaseModel):
    id: str
    context: str
    response: str


class ExplainRequest(BaseModel):
    example: ExampleBody
    method: str = "lerg-s"
    samples: int = 1000
    max_mask_ratio: float = 0.5
    seed: int = 0
    segmenter: str = "whitespace"


class ExplainReply(BaseModel):
    example_id: str
    method: str
    csv: str
    json_report: dict
    svg: str


class EvalRequest(BaseModel):
    corpus: list[ExampleBody]
    methods: list[str] = Field(default_factory=lambda: ["lerg-s", "random"])
    ratios: list[float] = Field(default_factory=lambda: list(DEFAULT_RATIOS))
    samples: int = 1000
    max_mask_ratio: float = 0.5
    seed: int = 0
    trials: int = 10
    segmenter: str = "whitespace"


class EvalReply(BaseModel):
    csv: str
    json_report: dict
    svgs: dict[str, str]


class ErrorBody(BaseModel):
    error: str
    message: str
    exit_code: int
