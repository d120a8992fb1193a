"""Bigram + context-association scorer, the desk-scale stand-in for a
neural conditional generator.

The per-step distribution interpolates two normalized components:

    P(w | context, prev) = (1 - lam) * P_bigram(w | prev) + lam * P_assoc(w | context)

Both components use add-k smoothing over the response vocabulary (plus an
out-of-vocabulary bucket), so every step distribution sums to one and
every probability is strictly positive. ``lam = 0`` yields a model that
ignores its context entirely, which the metric tests rely on.
"""

from __future__ import annotations

import json
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError, EmptyCorpus, ValidationError
from ..types import Example, SegmentedText
from .base import KIND_NGRAM, Manifest

BOS = "<s>"
OOV = "<oov>"


class NgramModel:
    """Trained handle; construct via :func:`train_ngram` or :meth:`from_json`."""

    def __init__(
        self,
        vocab: Sequence[str],
        bigram: dict[str, dict[str, int]],
        assoc: dict[str, dict[str, int]],
        k: float = 0.5,
        lam: float = 0.5,
        max_batch: int = 4096,
    ):
        if k <= 0:
            raise DomainError("add-k smoothing requires k > 0")
        if not 0.0 <= lam <= 1.0:
            raise DomainError("interpolation weight must be in [0, 1]")
        if OOV not in vocab:
            raise ValidationError("vocabulary must include the out-of-vocabulary bucket")
        self.vocab = tuple(vocab)
        self._vindex = {w: i for i, w in enumerate(self.vocab)}
        self.bigram = bigram
        self.assoc = assoc
        self.k = float(k)
        self.lam = float(lam)
        self._bigram_totals = {prev: sum(row.values()) for prev, row in bigram.items()}
        self._assoc_totals = {c: sum(row.values()) for c, row in assoc.items()}
        self._manifest = Manifest(
            kind=KIND_NGRAM,
            normalized=True,
            max_batch=max_batch,
            vocabulary_policy="closed-with-oov",
            description="add-k bigram with context-association interpolation",
        )

    @property
    def manifest(self) -> Manifest:
        return self._manifest

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def _emit(self, token: str) -> str:
        return token if token in self._vindex else OOV

    def _bigram_prob(self, prev: str, token: str) -> float:
        row = self.bigram.get(prev, {})
        total = self._bigram_totals.get(prev, 0)
        return (row.get(token, 0) + self.k) / (total + self.k * self.vocab_size)

    def _assoc_terms(self, context_segments: Sequence[str], token: str) -> tuple[float, float]:
        num = 0.0
        den = 0.0
        for c in context_segments:
            row = self.assoc.get(c)
            if row is not None:
                num += row.get(token, 0)
                den += self._assoc_totals[c]
        return num + self.k, den + self.k * self.vocab_size

    def score_segments(self, context_segments, response_segments) -> list[float]:
        out = []
        prev = BOS
        for raw in response_segments:
            token = self._emit(raw)
            p_big = self._bigram_prob(prev, token)
            num, den = self._assoc_terms(context_segments, token)
            p = (1.0 - self.lam) * p_big + self.lam * (num / den)
            out.append(float(np.log(p)))
            prev = token
        return out

    def step_distribution(self, context_segments: Sequence[str], prev_token: str) -> np.ndarray:
        """Full distribution over the vocabulary for one step (tests use
        this to check normalization)."""
        prev = self._emit(prev_token) if prev_token != BOS else BOS
        probs = np.empty(self.vocab_size)
        for idx, token in enumerate(self.vocab):
            p_big = self._bigram_prob(prev, token)
            num, den = self._assoc_terms(context_segments, token)
            probs[idx] = (1.0 - self.lam) * p_big + self.lam * (num / den)
        return probs

    def bind(self, context: SegmentedText, response: SegmentedText) -> "_NgramMaskScorer":
        return _NgramMaskScorer(self, context.segments, response.segments)

    def to_json(self) -> str:
        payload = {
            "kind": KIND_NGRAM,
            "k": self.k,
            "lambda": self.lam,
            "vocab": list(self.vocab),
            "bigram": {p: dict(sorted(row.items())) for p, row in sorted(self.bigram.items())},
            "assoc": {c: dict(sorted(row.items())) for c, row in sorted(self.assoc.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "NgramModel":
        payload = json.loads(text)
        return NgramModel(
            vocab=payload["vocab"],
            bigram={p: {t: int(c) for t, c in row.items()} for p, row in payload["bigram"].items()},
            assoc={c: {t: int(n) for t, n in row.items()} for c, row in payload["assoc"].items()},
            k=float(payload["k"]),
            lam=float(payload["lambda"]),
        )


class _NgramMaskScorer:
    """Vectorized scorer bound to one (context, response).

    Association counts are integers, so the matrix products below are
    exact and agree bit-for-bit with the per-call path.
    """

    def __init__(self, model: NgramModel, context_segments: Sequence[str], response_segments: Sequence[str]):
        tokens = [model._emit(t) for t in response_segments]
        prevs = [BOS] + tokens[:-1]
        self._big = np.array([model._bigram_prob(p, t) for p, t in zip(prevs, tokens)])
        avec = np.zeros((len(context_segments), len(tokens)))
        rowsum = np.zeros(len(context_segments))
        for i, c in enumerate(context_segments):
            row = model.assoc.get(c)
            if row is not None:
                rowsum[i] = model._assoc_totals[c]
                for j, t in enumerate(tokens):
                    avec[i, j] = row.get(t, 0)
        self._avec = avec
        self._rowsum = rowsum
        self._k = model.k
        self._kv = model.k * model.vocab_size
        self._lam = model.lam

    def score_matrix(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        num = z @ self._avec + self._k
        den = (z @ self._rowsum)[:, None] + self._kv
        p = (1.0 - self._lam) * self._big[None, :] + self._lam * (num / den)
        return np.log(p)


def train_ngram(corpus: Iterable[Example], k: float = 0.5, lam: float = 0.5) -> NgramModel:
    """Count bigrams and context/response co-occurrences over a corpus."""
    bigram: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    assoc: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    tokens: set[str] = set()
    n_examples = 0
    for example in corpus:
        n_examples += 1
        resp = list(example.response.segments)
        tokens.update(resp)
        prev = BOS
        for t in resp:
            bigram[prev][t] += 1
            prev = t
        for c in example.context.segments:
            row = assoc[c]
            for t in resp:
                row[t] += 1
    if n_examples == 0:
        raise EmptyCorpus("training corpus is empty")
    vocab = sorted(tokens) + [OOV]
    return NgramModel(
        vocab=vocab,
        bigram={p: dict(row) for p, row in bigram.items()},
        assoc={c: dict(row) for c, row in assoc.items()},
        k=k,
        lam=lam,
    )
