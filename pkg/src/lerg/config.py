"""Run configuration, serialized into every artifact as its
reproducibility stamp."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from .evaluation import DEFAULT_RATIOS
from .types import Method


class ModelSpec(BaseModel):
    kind: Literal["additive", "ngram", "remote"]
    path: str | None = None
    endpoint: str | None = None
    server_cmd: str | None = None

    @model_validator(mode="after")
    def _complete(self) -> "ModelSpec":
        if self.kind in ("additive", "ngram") and not self.path:
            raise ValueError(f"model kind {self.kind!r} needs a spec file path")
        if self.kind == "remote" and bool(self.endpoint) == bool(self.server_cmd):
            raise ValueError("remote model needs exactly one of endpoint or server_cmd")
        return self


class RunConfig(BaseModel):
    model_config = {"protected_namespaces": ()}

    model: ModelSpec
    methods: list[str] = Field(default_factory=lambda: [Method.LERG_S.value])
    samples: int = 1000
    max_mask_ratio: float = 0.5
    ratios: list[float] = Field(default_factory=lambda: list(DEFAULT_RATIOS))
    seed: int = 0
    out_dir: str = "out"
    segmenter: str = "whitespace"
    strict: bool = True
    trials: int = 10
    reduction: Literal["sum", "max"] = "sum"
    kernel: bool = False
    kernel_sigma: float | None = None

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, value: list[str]) -> list[str]:
        known = {m.value for m in Method}
        for name in value:
            if name not in known:
                raise ValueError(f"unknown method {name!r}; known: {sorted(known)}")
        if not value:
            raise ValueError("at least one method is required")
        return value

    @field_validator("samples")
    @classmethod
    def _positive_samples(cls, value: int) -> int:
        if value < 1:
            raise ValueError("samples must be >= 1")
        return value

    @field_validator("max_mask_ratio")
    @classmethod
    def _ratio_range(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError("max_mask_ratio must be in (0, 1]")
        return value

    @field_validator("ratios")
    @classmethod
    def _grid(cls, value: list[float]) -> list[float]:
        prev = 0.0
        for r in value:
            if not prev < r <= 1.0:
                raise ValueError("ratios must be strictly increasing within (0, 1]")
            prev = r
        if not value:
            raise ValueError("at least one ratio is required")
        return value

    def stamp(self) -> dict:
        """Plain dict embedded in artifacts."""
        return self.model_dump(mode="json")
