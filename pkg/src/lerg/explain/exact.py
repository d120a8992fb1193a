"""Exact enumeration of marginal-contribution attributions for small M.

Two subset conventions exist because the sampled estimator's subset
distribution (size uniform on {0..M-2}) deliberately excludes the full
remainder, while the classical combinatorial weights s!(M-s-1)!/M! put
mass on every size up to M-1. FOOTNOTE_RANGE is the exact estimand of
the sampled estimators; CLASSICAL is the convention whose log-gain form
telescopes, so attribution totals equal the full-vs-empty log-likelihood
gap exactly.
"""

from __future__ import annotations

import enum

import numpy as np

from ..constants import LOG_PROB_FLOOR
from ..errors import ReferenceUnderflow
from ..models.base import GeneratorHandle, bind_mask_scorer
from ..perturb import enumerate_all_masks, kept_subset_probability, masks_to_matrix, shapley_subset_weight
from ..types import Example, ExplanationMatrix, Method


class SubsetConvention(enum.Enum):
    # expectation under the sampled estimators' subset pmf (sizes 0..M-2)
    FOOTNOTE_RANGE = "footnote-range"
    # classical combinatorial weights over all subset sizes 0..M-1
    CLASSICAL = "classical"


def exact_shapley(
    handle: GeneratorHandle,
    example: Example,
    log_gain: bool = False,
    convention: SubsetConvention = SubsetConvention.CLASSICAL,
) -> ExplanationMatrix:
    phi = _enumerate(handle, example, log_gain, convention)
    return ExplanationMatrix(phi, Method.EXACT_SHAPLEY, 0, 0)


def exact_lerg_s(handle: GeneratorHandle, example: Example) -> ExplanationMatrix:
    """Exact estimand of the sampled log-gain estimator."""
    phi = _enumerate(handle, example, log_gain=True, convention=SubsetConvention.FOOTNOTE_RANGE)
    return ExplanationMatrix(phi, Method.EXACT_LERG_S, 0, 0)


def _enumerate(
    handle: GeneratorHandle, example: Example, log_gain: bool, convention: SubsetConvention
) -> np.ndarray:
    m = example.m
    scorer = bind_mask_scorer(handle, example.context, example.response)
    if m == 1:
        pair = scorer.score_matrix(np.vstack([np.ones((1, 1)), np.zeros((1, 1))]))
        if log_gain:
            _require_floor(pair, "boundary")
            return (pair[0] - pair[1])[None, :]
        return (np.exp(pair[0]) - np.exp(pair[1]))[None, :]
    rows = []
    for i in range(m):
        masks = enumerate_all_masks(m, exclude_index=i)
        z_without = masks_to_matrix(masks)
        z_with = z_without.copy()
        z_with[:, i] = 1.0
        lp_with = scorer.score_matrix(z_with)
        lp_without = scorer.score_matrix(z_without)
        if log_gain:
            _require_floor(lp_with, "perturbed")
            _require_floor(lp_without, "perturbed")
            gains = lp_with - lp_without
        else:
            gains = np.exp(lp_with) - np.exp(lp_without)
        weights = np.asarray([_subset_mass(m, mask.kept_count, convention) for mask in masks])
        rows.append(weights @ gains)
    return np.vstack(rows)


def _subset_mass(m: int, kept: int, convention: SubsetConvention) -> float:
    if convention is SubsetConvention.CLASSICAL:
        return shapley_subset_weight(m, kept)
    if kept > m - 2:
        return 0.0  # the full remainder sits outside the sampled pmf's support
    return kept_subset_probability(m, kept)


def _require_floor(logprobs: np.ndarray, what: str) -> None:
    if np.min(logprobs) < LOG_PROB_FLOOR:
        raise ReferenceUnderflow(f"{what} probability underflows the 1e-12 floor")
