"""Attribution estimators: surrogate regressions, sampled marginal
contributions, and exact enumeration oracles."""

from .dispatch import run_method
from .exact import SubsetConvention, exact_lerg_s, exact_shapley
from .montecarlo import lerg_s, sampled_shapley
from .regression import fit_lerg_l, fit_lime, solve_weighted_least_squares
from .saliency import selection_size, top_k_segments

__all__ = [
    "run_method",
    "SubsetConvention",
    "exact_lerg_s",
    "exact_shapley",
    "lerg_s",
    "sampled_shapley",
    "fit_lerg_l",
    "fit_lime",
    "solve_weighted_least_squares",
    "selection_size",
    "top_k_segments",
]
