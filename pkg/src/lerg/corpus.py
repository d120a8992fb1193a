"""Corpus ingestion and synthetic corpus construction.

The JSONL shape is one object per line: {"id": ..., "context": ...,
"response": ...}, all strings. Strict ingestion fails on the first bad
line with its line number; lenient ingestion reports the bad line and
keeps going.

The synthetic generator builds topic-structured dialogue-like corpora
where a few context words genuinely predict the response (they only
ever co-occur with their own topic's response words) and the rest are
shared filler. Training the bundled n-gram model on such a corpus gives
a testbed where faithful saliency is separable from random selection.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Iterator

from .errors import EmptyFile, ParseError, ValidationError
from .rng import derive_rng
from .segmentation import get_segmenter
from .types import Example, SegmentedText

log = logging.getLogger("lerg.corpus")

_REQUIRED = ("id", "context", "response")


def _parse_line(line: str, line_number: int, segmenter: str) -> Example:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {line_number}: invalid JSON ({exc.msg})", line_number) from exc
    if not isinstance(payload, dict):
        raise ParseError(f"line {line_number}: expected an object", line_number)
    for field in _REQUIRED:
        if field not in payload:
            raise ParseError(f"line {line_number}: missing field {field!r}", line_number)
        if not isinstance(payload[field], str):
            raise ParseError(f"line {line_number}: field {field!r} must be a string", line_number)
    segment = get_segmenter(segmenter)
    try:
        context = segment(payload["context"])
        response = segment(payload["response"])
    except ValidationError as exc:
        raise ParseError(f"line {line_number}: {exc}", line_number) from exc
    return Example(context=context, response=response, id=payload["id"])


def ingest_jsonl(
    path: str,
    strict: bool = True,
    segmenter: str = "whitespace",
    errors: list[ParseError] | None = None,
) -> Iterator[Example]:
    """Yield Examples from a JSONL file in file order.

    Strict mode raises on the first malformed line. Lenient mode logs
    each malformed line, appends it to ``errors`` when a list is given,
    and yields the rest. Either way an exhausted file that produced no
    examples raises EmptyFile.
    """
    if not os.path.exists(path):
        raise ValidationError(f"corpus file {path!r} does not exist")
    yielded = 0
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                example = _parse_line(line, line_number, segmenter)
                if example.id in seen_ids:
                    raise ParseError(f"line {line_number}: duplicate id {example.id!r}", line_number)
            except ParseError as exc:
                if strict:
                    raise
                log.warning("skipping malformed line: %s", exc)
                if errors is not None:
                    errors.append(exc)
                continue
            seen_ids.add(example.id)
            yielded += 1
            yield example
    if yielded == 0:
        raise EmptyFile(f"corpus file {path!r} contains no examples")


def load_corpus(path: str, strict: bool = True, segmenter: str = "whitespace") -> tuple[list[Example], list[ParseError]]:
    errors: list[ParseError] = []
    examples = list(ingest_jsonl(path, strict=strict, segmenter=segmenter, errors=errors))
    return examples, errors


def write_jsonl(path: str, examples: list[Example]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for example in examples:
            fh.write(
                json.dumps(
                    {
                        "id": example.id,
                        "context": example.context.source,
                        "response": example.response.source,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


_FILLERS = (
    "well", "so", "ok", "right", "you", "know", "see", "just",
    "really", "maybe", "then", "now",
)

_TOPICS = (
    ("weather", ("rain", "cloud", "storm", "sunny"), ("umbrella", "forecast", "wet", "cold", "sky")),
    ("food", ("pizza", "pasta", "oven", "recipe"), ("dinner", "delicious", "hungry", "cook", "taste")),
    ("travel", ("flight", "hotel", "ticket", "airport"), ("luggage", "passport", "departure", "arrive", "trip")),
    ("music", ("guitar", "concert", "band", "drums"), ("song", "stage", "loud", "melody", "crowd")),
    ("sport", ("match", "goal", "team", "coach"), ("score", "win", "defense", "season", "play")),
    ("work", ("meeting", "deadline", "report", "office"), ("schedule", "project", "email", "boss", "task")),
    ("garden", ("flower", "seed", "soil", "shovel"), ("bloom", "water", "grow", "leaf", "spring")),
    ("books", ("novel", "author", "chapter", "library"), ("story", "read", "page", "plot", "ending")),
)


def generate_corpus(
    n_examples: int = 100,
    seed: int = 0,
    signal_words: int = 3,
    filler_words: int = 7,
    response_length: int = 4,
) -> list[Example]:
    """Topic-structured synthetic corpus of ``n_examples`` dialogues.

    Each context mixes ``signal_words`` tokens private to its topic with
    ``filler_words`` tokens shared across all topics, in random order;
    each response draws from the topic's private response tokens.
    """
    if n_examples < 1:
        raise ValidationError("n_examples must be >= 1")
    if signal_words < 1 or response_length < 1:
        raise ValidationError("signal_words and response_length must be >= 1")
    examples = []
    for i in range(n_examples):
        _, topic_context, topic_response = _TOPICS[i % len(_TOPICS)]
        rng = derive_rng(seed, "corpus", i)
        signal = [topic_context[int(j)] for j in rng.choice(len(topic_context), size=min(signal_words, len(topic_context)), replace=False)]
        filler = [_FILLERS[int(j)] for j in rng.choice(len(_FILLERS), size=min(filler_words, len(_FILLERS)), replace=False)]
        context_tokens = signal + filler
        order = rng.permutation(len(context_tokens))
        context_tokens = [context_tokens[int(j)] for j in order]
        response_tokens = [
            topic_response[int(j)]
            for j in rng.choice(len(topic_response), size=min(response_length, len(topic_response)), replace=False)
        ]
        examples.append(
            Example(
                context=SegmentedText.from_segments(context_tokens),
                response=SegmentedText.from_segments(response_tokens),
                id=f"ex-{i:04d}",
            )
        )
    return examples
