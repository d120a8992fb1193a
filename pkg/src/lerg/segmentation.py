"""Text segmentation.

Whitespace words are the default unit; alternative segmenters register
under a name so subword or phrase granularity can be plugged in without
touching the estimators.
"""

from __future__ import annotations

import re
from typing import Callable

from .errors import EmptyText, ValidationError
from .types import SegmentedText

_TOKEN_RE = re.compile(r"\S+")

Segmenter = Callable[[str], SegmentedText]

_REGISTRY: dict[str, Segmenter] = {}


def register_segmenter(name: str, fn: Segmenter) -> None:
    _REGISTRY[name] = fn


def get_segmenter(name: str) -> Segmenter:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValidationError(f"unknown segmenter {name!r}; known: {sorted(_REGISTRY)}") from None


def segment_whitespace(text: str) -> SegmentedText:
    """Split into maximal whitespace-delimited runs, recording offsets."""
    matches = list(_TOKEN_RE.finditer(text))
    if not matches:
        raise EmptyText("text has no non-whitespace content")
    segments = tuple(m.group(0) for m in matches)
    offsets = tuple((m.start(), m.end()) for m in matches)
    return SegmentedText(segments, offsets, text)


register_segmenter("whitespace", segment_whitespace)
