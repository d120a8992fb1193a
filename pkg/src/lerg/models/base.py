"""The black-box conditional-generator interface.

A handle answers score queries statelessly: the same (context, response)
always yields the same per-step log-probabilities. Everything downstream
(estimators, metrics) sees only this surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ..constants import EPS_NORM
from ..errors import ScoreDomainError, ValidationError
from ..types import SegmentedText, StepLogProbs

KIND_ADDITIVE_TOY = "additive-toy"
KIND_NGRAM = "ngram"
KIND_REMOTE = "remote"


@dataclass(frozen=True)
class Manifest:
    """What a handle declares about itself.

    ``normalized`` means scores are true conditional log-probabilities;
    metrics refuse perplexity computation when it is False.
    """

    kind: str
    normalized: bool
    max_batch: int
    vocabulary_policy: str = "open"
    description: str = ""


@runtime_checkable
class GeneratorHandle(Protocol):
    """Scorer protocol: log P(y_j | context, y_<j) for j = 1..N."""

    @property
    def manifest(self) -> Manifest: ...

    def score_segments(self, context_segments: Sequence[str], response_segments: Sequence[str]) -> list[float]: ...


class MaskScorer(Protocol):
    """Optional vectorized fast path bound to one (context, response).

    ``score_matrix`` takes an (n, M) 0/1 design block and returns the
    (n, N) log-probabilities of scoring each masked context. Values must
    match the generic per-call path to within float round-off.
    """

    def score_matrix(self, z: np.ndarray) -> np.ndarray: ...


def _validate_values(values: Sequence[float], manifest: Manifest, n: int, where: str = "") -> StepLogProbs:
    values = [float(v) for v in values]
    if len(values) != n:
        raise ScoreDomainError(f"{where}expected {n} step scores, got {len(values)}")
    for j, v in enumerate(values):
        if not math.isfinite(v):
            raise ScoreDomainError(f"{where}non-finite score at step {j}")
        if manifest.normalized and v > EPS_NORM:
            raise ScoreDomainError(f"{where}log-probability {v} above normalization tolerance at step {j}")
    return StepLogProbs(tuple(values))


def score(handle: GeneratorHandle, context_segments: Sequence[str], response: SegmentedText) -> StepLogProbs:
    """Score one context (possibly empty) against a response."""
    if len(response) < 1:
        raise ValidationError("response must have at least one segment")
    raw = handle.score_segments(list(context_segments), list(response.segments))
    return _validate_values(raw, handle.manifest, len(response))


def score_batch(
    handle: GeneratorHandle, contexts: Sequence[Sequence[str]], response: SegmentedText
) -> list[StepLogProbs]:
    """Score several contexts against one response, order preserved.

    Batch size must not exceed the manifest's max; a failing element
    fails the whole batch with its index reported.
    """
    if len(contexts) > handle.manifest.max_batch:
        raise ValidationError(f"batch of {len(contexts)} exceeds manifest max_batch {handle.manifest.max_batch}")
    batcher = getattr(handle, "score_segments_batch", None)
    if batcher is not None:
        rows = batcher([list(c) for c in contexts], list(response.segments))
        if len(rows) != len(contexts):
            raise ScoreDomainError(f"expected {len(contexts)} score rows, got {len(rows)}")
        return [_validate_values(row, handle.manifest, len(response), f"batch element {k}: ") for k, row in enumerate(rows)]
    out = []
    for k, context in enumerate(contexts):
        raw = handle.score_segments(list(context), list(response.segments))
        out.append(_validate_values(raw, handle.manifest, len(response), f"batch element {k}: "))
    return out


def score_all(
    handle: GeneratorHandle, contexts: Sequence[Sequence[str]], response: SegmentedText
) -> np.ndarray:
    """Score any number of contexts, chunking to the manifest's max batch.

    Returns an (n_contexts, N) array of log-probabilities.
    """
    max_batch = handle.manifest.max_batch
    rows: list[tuple[float, ...]] = []
    for start in range(0, len(contexts), max_batch):
        chunk = contexts[start : start + max_batch]
        rows.extend(slp.values for slp in score_batch(handle, chunk, response))
    return np.asarray(rows, dtype=np.float64).reshape(len(contexts), len(response))


def bind_mask_scorer(handle: GeneratorHandle, context: SegmentedText, response: SegmentedText) -> MaskScorer:
    """Return the handle's vectorized scorer for this example, or a
    generic fallback that routes each mask through ``score_all``."""
    binder = getattr(handle, "bind", None)
    if binder is not None:
        return binder(context, response)
    return _GenericMaskScorer(handle, context, response)


class _GenericMaskScorer:
    def __init__(self, handle: GeneratorHandle, context: SegmentedText, response: SegmentedText):
        self._handle = handle
        self._context = context
        self._response = response

    def score_matrix(self, z: np.ndarray) -> np.ndarray:
        segments = self._context.segments
        contexts = [[seg for seg, bit in zip(segments, row) if bit] for row in np.asarray(z)]
        return score_all(self._handle, contexts, self._response)
