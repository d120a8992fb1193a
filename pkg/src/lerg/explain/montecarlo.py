"""Marginal-contribution estimators over sampled kept-subsets.

Both walk the target segments i, draw kept subsets of the remaining
segments from the size-uniform subset sampler, and average the gain of
adding segment i back. ``lerg_s`` averages log-probability differences;
``sampled_shapley`` averages probability differences, either plainly or
self-normalized under the combinatorial subset weights.

The two model calls per target (with i, without i) share one mask
batch, so a sampled estimate and its exact-enumeration oracle disagree
only by Monte Carlo error, never by sampling-protocol mismatch.
"""

from __future__ import annotations

import numpy as np

from ..constants import LOG_PROB_FLOOR
from ..errors import ReferenceUnderflow
from ..models.base import GeneratorHandle, MaskScorer, bind_mask_scorer
from ..perturb import PerturbPlan, masks_to_matrix, sample_shapley_masks, shapley_subset_weight
from ..types import Example, ExplanationMatrix, Method


def _boundary_rows(scorer: MaskScorer, m: int) -> tuple[np.ndarray, np.ndarray]:
    pair = scorer.score_matrix(np.vstack([np.ones((1, m)), np.zeros((1, m))]))
    return pair[0], pair[1]


def _require_floor(logprobs: np.ndarray, what: str) -> None:
    if np.min(logprobs) < LOG_PROB_FLOOR:
        raise ReferenceUnderflow(f"{what} probability underflows the 1e-12 floor")


def _marginal_batches(scorer: MaskScorer, plan: PerturbPlan, m: int, i: int):
    masks = sample_shapley_masks(plan, m, i)
    z_without = masks_to_matrix(masks)
    z_with = z_without.copy()
    z_with[:, i] = 1.0
    return masks, scorer.score_matrix(z_with), scorer.score_matrix(z_without)


def lerg_s(handle: GeneratorHandle, example: Example, plan: PerturbPlan) -> ExplanationMatrix:
    """Mean log-probability gain of adding segment i, per output step."""
    m = example.m
    scorer = bind_mask_scorer(handle, example.context, example.response)
    if m == 1:
        full, empty = _boundary_rows(scorer, m)
        _require_floor(full, "full-input")
        _require_floor(empty, "empty-input")
        phi = (full - empty)[None, :]
        return ExplanationMatrix(phi, Method.LERG_S, plan.sample_count, plan.seed)
    rows = []
    for i in range(m):
        _, lp_with, lp_without = _marginal_batches(scorer, plan, m, i)
        _require_floor(lp_with, "perturbed")
        _require_floor(lp_without, "perturbed")
        rows.append((lp_with - lp_without).mean(axis=0))
    return ExplanationMatrix(np.vstack(rows), Method.LERG_S, plan.sample_count, plan.seed)


def sampled_shapley(
    handle: GeneratorHandle, example: Example, plan: PerturbPlan, weighted: bool = True
) -> ExplanationMatrix:
    """Mean probability gain of adding segment i, per output step.

    ``weighted=True`` self-normalizes under the subset weights
    s!(M-s-1)!/M!; ``weighted=False`` drops them for a plain average
    over the same draws.
    """
    m = example.m
    method = Method.SHAPLEY if weighted else Method.SHAPLEY_W
    scorer = bind_mask_scorer(handle, example.context, example.response)
    if m == 1:
        full, empty = _boundary_rows(scorer, m)
        phi = (np.exp(full) - np.exp(empty))[None, :]
        return ExplanationMatrix(phi, method, plan.sample_count, plan.seed)
    rows = []
    for i in range(m):
        masks, lp_with, lp_without = _marginal_batches(scorer, plan, m, i)
        gains = np.exp(lp_with) - np.exp(lp_without)
        if weighted:
            w = np.asarray([shapley_subset_weight(m, mask.kept_count) for mask in masks])
            rows.append(w @ gains / w.sum())
        else:
            rows.append(gains.mean(axis=0))
    return ExplanationMatrix(np.vstack(rows), method, plan.sample_count, plan.seed)
