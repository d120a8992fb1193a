"""Surrogate-regression estimators.

Both estimators fit, per output step j, a linear model of the gain as a
function of the inclusion mask z. They share one perturbation batch (a
single model call scores every step) and one solver: normal equations
with an intercept column, ridge damping on the diagonal, and one
iterative-refinement step against the undamped system so the returned
coefficients satisfy the plain least-squares optimality condition to
well below 1e-8. The intercept row never enters the returned matrix.

The gain differs per estimator: raw step probability for ``fit_lime``,
step-probability ratio against the full input for ``fit_lerg_l``. The
ratio's log variant (fitting log-ratios instead) sits behind
``log_target`` so the two parameterizations can be compared empirically
instead of assumed order-equivalent.
"""

from __future__ import annotations

import numpy as np

from ..constants import LOG_PROB_FLOOR, RIDGE
from ..errors import ReferenceUnderflow, SingularSystem
from ..models.base import GeneratorHandle, bind_mask_scorer
from ..perturb import PerturbPlan, masks_to_matrix, sample_uniform_masks
from ..types import Example, ExplanationMatrix, Method

# internal guard only; the external invariant asserts <= 1e-8
_RESIDUAL_GUARD = 1e-6


def _kernel_weights(z: np.ndarray, plan: PerturbPlan) -> np.ndarray | None:
    if not plan.kernel:
        return None
    m = z.shape[1]
    sigma = plan.kernel_sigma if plan.kernel_sigma is not None else m / 2.0
    hamming = m - z.sum(axis=1)
    return np.exp(-(hamming**2) / sigma**2)


def solve_weighted_least_squares(
    design: np.ndarray, targets: np.ndarray, weights: np.ndarray | None = None
) -> np.ndarray:
    """Solve argmin_B sum_k w_k * ||targets_k - design_k @ B||^2 column-wise.

    Ridge-damped normal equations plus one refinement step against the
    undamped system; the damping stabilizes the solve without shifting
    the optimum beyond O(ridge^2).
    """
    if weights is None:
        weighted = design
    else:
        weighted = design * weights[:, None]
    gram = design.T @ weighted
    rhs = weighted.T @ targets
    damped = gram + RIDGE * np.eye(gram.shape[0])
    try:
        coef = np.linalg.solve(damped, rhs)
        coef += np.linalg.solve(damped, rhs - gram @ coef)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"normal equations unsolvable: {exc}") from exc
    if not np.all(np.isfinite(coef)):
        raise SingularSystem("normal equations produced non-finite coefficients")
    residual_gradient = rhs - gram @ coef
    if np.max(np.abs(residual_gradient)) > _RESIDUAL_GUARD:
        raise SingularSystem("design matrix rank-deficient beyond ridge repair")
    return coef


def _fit(handle: GeneratorHandle, example: Example, plan: PerturbPlan, targets_from) -> np.ndarray:
    masks = sample_uniform_masks(plan, example.m)
    z = masks_to_matrix(masks)
    scorer = bind_mask_scorer(handle, example.context, example.response)
    logprobs = scorer.score_matrix(z)
    targets = targets_from(scorer, logprobs)
    design = np.hstack([z, np.ones((z.shape[0], 1))])
    coef = solve_weighted_least_squares(design, targets, _kernel_weights(z, plan))
    return coef[:-1, :]  # drop the intercept row


def fit_lime(handle: GeneratorHandle, example: Example, plan: PerturbPlan) -> ExplanationMatrix:
    """Surrogate regression on raw step probabilities."""

    def targets_from(_scorer, logprobs):
        return np.exp(logprobs)

    phi = _fit(handle, example, plan, targets_from)
    return ExplanationMatrix(phi, Method.LIME, plan.sample_count, plan.seed)


def fit_lerg_l(
    handle: GeneratorHandle, example: Example, plan: PerturbPlan, log_target: bool = False
) -> ExplanationMatrix:
    """Surrogate regression on step-probability ratios against the full input.

    Raises ReferenceUnderflow when any full-input step probability sits
    below the floor, since the ratio then loses all meaning.
    """

    def targets_from(scorer, logprobs):
        reference = scorer.score_matrix(np.ones((1, example.m)))[0]
        for j, lp in enumerate(reference):
            if lp < LOG_PROB_FLOOR:
                raise ReferenceUnderflow(
                    f"full-input probability underflows the 1e-12 floor at step {j}"
                )
        shifted = logprobs - reference[None, :]
        return shifted if log_target else np.exp(shifted)

    phi = _fit(handle, example, plan, targets_from)
    return ExplanationMatrix(phi, Method.LERG_L, plan.sample_count, plan.seed)
