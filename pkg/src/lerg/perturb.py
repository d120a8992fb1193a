"""Mask samplers for the perturbation distributions each estimator uses.

Two samplers exist. The neighborhood sampler draws masks whose removed-set
size is uniform on {1..floor(max_masked_ratio*M)} — locality perturbations
for the regression estimators. The subset sampler draws, for a target
segment i, a kept subset of the remaining segments by first picking a size
s uniformly from {0..M-2} and then a uniform size-s subset; this realizes
the probability mass 1/((M-1) * C(M-1, s)) that the marginal-contribution
estimators average under, so it deliberately ignores max_masked_ratio.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DomainError, TooLarge
from .rng import derive_rng
from .types import Mask

ENUMERATION_CAP = 20


@dataclass(frozen=True)
class PerturbPlan:
    """Sampling configuration shared by all estimators.

    ``kernel`` turns on distance-kernel regression weights
    exp(-d^2 / sigma^2) on Hamming distance d (off by default, all
    regression weights equal); ``kernel_sigma`` overrides the width,
    which otherwise resolves to M/2 at fit time. ``max_masked_ratio``
    bounds only the neighborhood sampler.
    """

    seed: int
    sample_count: int = 1000
    max_masked_ratio: float = 0.5
    sampler: str = "default"
    kernel: bool = False
    kernel_sigma: float | None = None

    def __post_init__(self):
        if self.sample_count < 1:
            raise DomainError("sample_count must be >= 1")
        if not 0.0 < self.max_masked_ratio <= 1.0:
            raise DomainError("max_masked_ratio must be in (0, 1]")
        if self.kernel_sigma is not None and self.kernel_sigma <= 0:
            raise DomainError("kernel_sigma must be positive")


def max_removable(plan: PerturbPlan, m: int) -> int:
    return max(1, math.floor(plan.max_masked_ratio * m))


def sample_uniform_masks(plan: PerturbPlan, m: int) -> list[Mask]:
    """Draw ``plan.sample_count`` neighborhood masks for an M-segment input.

    Removed-set size is uniform on {1..floor(max_masked_ratio*M)},
    removed positions uniform without replacement. Never emits the
    all-zeros mask.
    """
    if m < 2:
        raise DegenerateInput("need at least 2 segments to perturb and keep a remainder")
    rng = derive_rng(plan.seed, "uniform-masks")
    k_max = max_removable(plan, m)
    masks = []
    for _ in range(plan.sample_count):
        size = int(rng.integers(1, k_max + 1))
        removed = rng.choice(m, size=size, replace=False)
        bits = [1] * m
        for idx in removed:
            bits[idx] = 0
        masks.append(Mask(tuple(bits)))
    return masks


def shapley_subset_weight(total: int, subset_size: int) -> float:
    """Combinatorial weight s!(M-s-1)!/M! for a size-s subset of M players."""
    if total < 1:
        raise DomainError("total must be >= 1")
    if subset_size < 0 or subset_size >= total:
        raise DomainError(f"subset size {subset_size} outside [0, {total - 1}]")
    return math.factorial(subset_size) * math.factorial(total - subset_size - 1) / math.factorial(total)


def kept_subset_probability(total: int, subset_size: int) -> float:
    """Probability mass 1/((M-1) * C(M-1, s)) of one kept subset of size s.

    Defined for s in {0..M-2}; the full remainder is outside the support.
    """
    if total < 2:
        raise DomainError("subset distribution needs at least 2 segments")
    if subset_size < 0 or subset_size > total - 2:
        raise DomainError(f"subset size {subset_size} outside [0, {total - 2}]")
    return 1.0 / ((total - 1) * math.comb(total - 1, subset_size))


def sample_shapley_masks(plan: PerturbPlan, m: int, target_index: int) -> list[Mask]:
    """Draw kept subsets of the segments other than ``target_index``.

    Size s is uniform on {0..M-2}, the subset uniform within its size;
    bit ``target_index`` is always 0. The empty subset is part of the
    support and is emitted when drawn.
    """
    if m < 2:
        raise DegenerateInput("need at least 2 segments for marginal-contribution sampling")
    if not 0 <= target_index < m:
        raise DomainError(f"target index {target_index} outside [0, {m - 1}]")
    rng = derive_rng(plan.seed, "shapley-masks", target_index)
    others = np.array([i for i in range(m) if i != target_index])
    masks = []
    for _ in range(plan.sample_count):
        size = int(rng.integers(0, m - 1))  # uniform on {0..M-2}
        bits = [0] * m
        if size:
            for idx in rng.choice(others, size=size, replace=False):
                bits[idx] = 1
        masks.append(Mask(tuple(bits)))
    return masks


def enumerate_all_masks(m: int, exclude_index: int | None = None) -> list[Mask]:
    """All 2^M masks (or 2^(M-1) with one bit pinned to 0), lexicographic."""
    if m > ENUMERATION_CAP:
        raise TooLarge(f"M={m} exceeds the enumeration cap of {ENUMERATION_CAP}")
    if m < 1:
        raise DegenerateInput("need at least one segment")
    if exclude_index is None:
        return [Mask(bits) for bits in itertools.product((0, 1), repeat=m)]
    if not 0 <= exclude_index < m:
        raise DomainError(f"exclude index {exclude_index} outside [0, {m - 1}]")
    masks = []
    for partial in itertools.product((0, 1), repeat=m - 1):
        bits = partial[:exclude_index] + (0,) + partial[exclude_index:]
        masks.append(Mask(bits))
    return masks


def masks_to_matrix(masks: list[Mask]) -> np.ndarray:
    """Stack masks into an (n_masks, M) float design block."""
    return np.asarray([mask.bits for mask in masks], dtype=np.float64)
