"""Model handles and the scoring seam the explainers ride on."""

from .base import (
    KIND_ADDITIVE_TOY,
    KIND_NGRAM,
    KIND_REMOTE,
    Manifest,
    MaskScorer,
    bind_mask_scorer,
    score,
    score_all,
    score_batch,
)
from .additive import AdditiveToyModel, AdditiveToySpec
from .ngram import NgramModel, train_ngram
from .remote import HttpTransport, RemoteModel, StdioTransport, connect

__all__ = [
    "KIND_ADDITIVE_TOY",
    "KIND_NGRAM",
    "KIND_REMOTE",
    "Manifest",
    "MaskScorer",
    "bind_mask_scorer",
    "score",
    "score_all",
    "score_batch",
    "AdditiveToyModel",
    "AdditiveToySpec",
    "NgramModel",
    "train_ngram",
    "RemoteModel",
    "StdioTransport",
    "HttpTransport",
    "connect",
]
