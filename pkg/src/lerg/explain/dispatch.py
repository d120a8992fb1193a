"""Name-to-estimator dispatch shared by the sweep harness, CLI, and service."""

from __future__ import annotations

from ..errors import DomainError
from ..models.base import GeneratorHandle
from ..perturb import PerturbPlan
from ..types import Example, ExplanationMatrix, Method
from .exact import SubsetConvention, exact_lerg_s, exact_shapley
from .montecarlo import lerg_s, sampled_shapley
from .regression import fit_lerg_l, fit_lime


def run_method(
    handle: GeneratorHandle, example: Example, method: Method, plan: PerturbPlan
) -> ExplanationMatrix:
    if method is Method.LIME:
        return fit_lime(handle, example, plan)
    if method is Method.LERG_L:
        return fit_lerg_l(handle, example, plan)
    if method is Method.SHAPLEY:
        return sampled_shapley(handle, example, plan, weighted=True)
    if method is Method.SHAPLEY_W:
        return sampled_shapley(handle, example, plan, weighted=False)
    if method is Method.LERG_S:
        return lerg_s(handle, example, plan)
    if method is Method.EXACT_SHAPLEY:
        return exact_shapley(handle, example, log_gain=False, convention=SubsetConvention.CLASSICAL)
    if method is Method.EXACT_LERG_S:
        return exact_lerg_s(handle, example)
    raise DomainError(f"{method.value} does not produce an explanation matrix")
