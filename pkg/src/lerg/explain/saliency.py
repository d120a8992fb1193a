"""Segment selection on top of saliency scores."""

from __future__ import annotations

import math

from ..errors import DomainError
from ..types import Saliency

# absorbs float noise in ratio*M products that are mathematically integral
_RATIO_EPS = 1e-9


def selection_size(total: int, ratio: float) -> int:
    if not 0.0 < ratio <= 1.0:
        raise DomainError(f"ratio {ratio} outside (0, 1]")
    return min(total, max(1, math.ceil(ratio * total - _RATIO_EPS)))


def top_k_segments(saliency: Saliency, ratio: float) -> tuple[int, ...]:
    """Indices of the ceil(ratio*M) highest-scoring segments.

    Ties go to the lower index; the result is in positional order, so
    it can drive order-preserving deletion or concatenation directly.
    """
    k = selection_size(len(saliency), ratio)
    ranked = sorted(range(len(saliency)), key=lambda i: (-saliency.scores[i], i))
    return tuple(sorted(ranked[:k]))
