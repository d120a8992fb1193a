"""Domain types shared by every module.

All types are immutable after construction and validate their invariants
eagerly, so a value that exists is a value that is well-formed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


class Method(enum.Enum):
    """Attribution estimators this package implements."""

    LIME = "lime"
    LERG_L = "lerg-l"
    SHAPLEY = "shapley"
    SHAPLEY_W = "shapley-w"
    LERG_S = "lerg-s"
    EXACT_SHAPLEY = "exact-shapley"
    EXACT_LERG_S = "exact-lerg-s"
    # not an estimator: uniform-random segment selection, the control
    # the saliency-driven methods are compared against
    RANDOM = "random"


class Reduction(enum.Enum):
    """How an explanation matrix row is collapsed to one saliency score."""

    SUM_OVER_J = "sum"
    MAX_OVER_J = "max"


@dataclass(frozen=True)
class SegmentedText:
    """An ordered list of text units plus their spans in the source string.

    Offsets are (start, end) character spans, strictly increasing and
    non-overlapping; reassembling segments by offsets reproduces the
    source up to inter-segment whitespace.
    """

    segments: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    source: str

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("SegmentedText requires at least one segment")
        if len(self.segments) != len(self.offsets):
            raise ValidationError("segments and offsets length mismatch")
        prev_end = -1
        for seg, (start, end) in zip(self.segments, self.offsets):
            if start <= prev_end:
                raise ValidationError("offsets must be strictly increasing and non-overlapping")
            if end <= start:
                raise ValidationError("empty offset span")
            if self.source[start:end] != seg:
                raise ValidationError("segment does not match its source span")
            prev_end = end

    def __len__(self) -> int:
        return len(self.segments)

    @staticmethod
    def from_segments(segments: list[str] | tuple[str, ...]) -> "SegmentedText":
        """Build from bare segments, joining with single spaces."""
        segments = tuple(segments)
        source = " ".join(segments)
        offsets = []
        cursor = 0
        for seg in segments:
            offsets.append((cursor, cursor + len(seg)))
            cursor += len(seg) + 1
        return SegmentedText(segments, tuple(offsets), source)


@dataclass(frozen=True)
class Example:
    """One (context, response) pair to be explained."""

    context: SegmentedText
    response: SegmentedText
    id: str

    def __post_init__(self):
        if len(self.context) < 1 or len(self.response) < 1:
            raise ValidationError(f"example {self.id!r}: context and response must be non-empty")

    @property
    def m(self) -> int:
        return len(self.context)

    @property
    def n(self) -> int:
        return len(self.response)


@dataclass(frozen=True)
class Mask:
    """Binary inclusion vector over context segments: 1 keeps, 0 removes."""

    bits: tuple[int, ...]
    kept_count: int = field(default=-1)

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError("mask bits must be 0 or 1")
        ones = sum(self.bits)
        if self.kept_count == -1:
            object.__setattr__(self, "kept_count", ones)
        elif self.kept_count != ones:
            raise ValidationError("kept_count does not match bits")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def removed_count(self) -> int:
        return len(self.bits) - self.kept_count

    def kept_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.bits) if b)

    def apply(self, segments: tuple[str, ...]) -> list[str]:
        """Kept segments, original order preserved (deletion semantics)."""
        if len(segments) != len(self.bits):
            raise ValidationError("mask length does not match segment count")
        return [seg for seg, b in zip(segments, self.bits) if b]

    @staticmethod
    def from_kept(m: int, kept: tuple[int, ...] | list[int]) -> "Mask":
        kept_set = set(kept)
        return Mask(tuple(1 if i in kept_set else 0 for i in range(m)))

    @staticmethod
    def full(m: int) -> "Mask":
        """Boundary mask keeping every segment."""
        return Mask((1,) * m)

    @staticmethod
    def empty(m: int) -> "Mask":
        """Boundary mask removing every segment (metric/property use only)."""
        return Mask((0,) * m)


@dataclass(frozen=True)
class StepLogProbs:
    """Per-step conditional log-probabilities, natural log scale."""

    values: tuple[float, ...]

    def __post_init__(self):
        for v in self.values:
            if not math.isfinite(v):
                raise ValidationError("step log-probabilities must be finite")

    def __len__(self) -> int:
        return len(self.values)

    def total(self) -> float:
        return sum(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class ExplanationMatrix:
    """Attribution of input segment i to output step j, shape (M, N)."""

    phi: np.ndarray
    method: Method
    sample_count: int
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.phi, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError("explanation matrix must be 2-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("explanation matrix entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class Saliency:
    """Per-input-segment scores, a declared reduction of matrix rows."""

    scores: tuple[float, ...]
    reduction: Reduction

    @staticmethod
    def from_matrix(matrix: ExplanationMatrix, reduction: Reduction = Reduction.SUM_OVER_J) -> "Saliency":
        if reduction is Reduction.SUM_OVER_J:
            scores = matrix.phi.sum(axis=1)
        else:
            scores = matrix.phi.max(axis=1)
        return Saliency(tuple(float(s) for s in scores), reduction)

    def __len__(self) -> int:
        return len(self.scores)
