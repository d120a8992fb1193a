"""Additive test double with analytically known attributions.

Step j under mask z scores exactly base[j] + sum_i z_i * weights[i][j],
so every log-difference estimator must recover the weight matrix itself.
Accumulation is in increasing segment order on every code path, keeping
independently implemented scorers bit-compatible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..types import SegmentedText
from .base import KIND_ADDITIVE_TOY, Manifest

_FULL_INPUT_TOL = 1e-9


@dataclass(frozen=True)
class AdditiveToySpec:
    """Base log-scores b (length N) and contribution matrix W (M x N)."""

    base: tuple[float, ...]
    weights: tuple[tuple[float, ...], ...]
    segments: tuple[str, ...]
    normalized: bool = False

    def __post_init__(self):
        n = len(self.base)
        if any(len(row) != n for row in self.weights):
            raise ValidationError("every weight row must have one entry per response step")
        if len(self.segments) != len(self.weights):
            raise ValidationError("one segment name per weight row required")
        if len(set(self.segments)) != len(self.segments):
            raise ValidationError("segment names must be distinct")
        for j in range(n):
            total = self.base[j] + sum(row[j] for row in self.weights)
            if total > _FULL_INPUT_TOL:
                raise ValidationError(f"full-input score {total} at step {j} exceeds 0")

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.base)

    def to_json(self) -> str:
        payload = {
            "base": list(self.base),
            "weights": [list(row) for row in self.weights],
            "segments": list(self.segments),
            "normalized": self.normalized,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "AdditiveToySpec":
        payload = json.loads(text)
        return AdditiveToySpec(
            base=tuple(float(v) for v in payload["base"]),
            weights=tuple(tuple(float(v) for v in row) for row in payload["weights"]),
            segments=tuple(payload["segments"]),
            normalized=bool(payload.get("normalized", False)),
        )


class AdditiveToyModel:
    """Handle over an :class:`AdditiveToySpec`."""

    def __init__(self, spec: AdditiveToySpec, max_batch: int = 4096):
        self.spec = spec
        self._index = {name: i for i, name in enumerate(spec.segments)}
        self._manifest = Manifest(
            kind=KIND_ADDITIVE_TOY,
            normalized=spec.normalized,
            max_batch=max_batch,
            vocabulary_policy="fixed-segments",
            description="additive log-score test double",
        )

    @property
    def manifest(self) -> Manifest:
        return self._manifest

    def example_context(self) -> SegmentedText:
        return SegmentedText.from_segments(self.spec.segments)

    def score_segments(self, context_segments, response_segments) -> list[float]:
        if len(response_segments) != self.spec.n:
            raise ValidationError(f"this model scores exactly {self.spec.n} response steps")
        kept = [False] * self.spec.m
        for seg in context_segments:
            idx = self._index.get(seg)
            if idx is not None:
                kept[idx] = True
        out = []
        for j in range(self.spec.n):
            value = self.spec.base[j]
            for i in range(self.spec.m):
                if kept[i]:
                    value += self.spec.weights[i][j]
            out.append(value)
        return out

    def bind(self, context: SegmentedText, response: SegmentedText) -> "_AdditiveMaskScorer":
        if tuple(context.segments) != self.spec.segments:
            raise ValidationError("bound context must match the model's reference segments")
        if len(response) != self.spec.n:
            raise ValidationError(f"this model scores exactly {self.spec.n} response steps")
        return _AdditiveMaskScorer(self.spec)


class _AdditiveMaskScorer:
    def __init__(self, spec: AdditiveToySpec):
        self._base = np.asarray(spec.base, dtype=np.float64)
        self._weights = np.asarray(spec.weights, dtype=np.float64)

    def score_matrix(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        out = np.tile(self._base, (z.shape[0], 1))
        # row-masked adds in increasing i replicate the scalar path's
        # left-to-right accumulation bit-for-bit
        for i in range(self._weights.shape[0]):
            kept = z[:, i] == 1.0
            if kept.any():
                out[kept] += self._weights[i]
        return out
