"""Orchestration shared by the CLI and the HTTP service.

Both surfaces produce artifacts the same way: build a model handle from
the config, run estimators/sweeps, and render artifact strings. The CLI
writes the strings to disk; the service returns them in envelopes. One
code path means the two surfaces cannot drift apart numerically.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

from .config import ModelSpec, RunConfig
from .errors import ValidationError
from .evaluation import Metric, sweep
from .explain.dispatch import run_method
from .models.additive import AdditiveToyModel, AdditiveToySpec
from .models.base import GeneratorHandle
from .models.ngram import NgramModel
from .models.remote import connect
from .perturb import PerturbPlan
from .report import curves_svg, heatmap_svg, matrix_csv, matrix_json, report_csv, report_json
from .types import Example, Method, Reduction


@contextlib.contextmanager
def open_model(spec: ModelSpec):
    """Yield a scoring handle; closes remote transports on exit."""
    if spec.kind == "additive":
        with open(spec.path, encoding="utf-8") as fh:
            yield AdditiveToyModel(AdditiveToySpec.from_json(fh.read()))
        return
    if spec.kind == "ngram":
        with open(spec.path, encoding="utf-8") as fh:
            yield NgramModel.from_json(fh.read())
        return
    remote = connect(endpoint=spec.endpoint, server_cmd=spec.server_cmd)
    try:
        yield remote
    finally:
        remote.close()


def build_plan(config: RunConfig) -> PerturbPlan:
    return PerturbPlan(
        seed=config.seed,
        sample_count=config.samples,
        max_masked_ratio=config.max_mask_ratio,
        kernel=config.kernel,
        kernel_sigma=config.kernel_sigma,
    )


def _reduction(config: RunConfig) -> Reduction:
    return Reduction.SUM_OVER_J if config.reduction == "sum" else Reduction.MAX_OVER_J


@dataclass(frozen=True)
class ExplainArtifacts:
    example_id: str
    method: Method
    csv: str
    json: str
    svg: str


def explain_artifacts(
    handle: GeneratorHandle,
    example: Example,
    method: Method,
    config: RunConfig,
    input_hash: str,
) -> ExplainArtifacts:
    if method is Method.RANDOM:
        raise ValidationError("the random baseline has no explanation matrix; use it with eval")
    matrix = run_method(handle, example, method, build_plan(config))
    stamp = config.stamp()
    return ExplainArtifacts(
        example_id=example.id,
        method=method,
        csv=matrix_csv(matrix, example),
        json=matrix_json(matrix, example, stamp, input_hash),
        svg=heatmap_svg(matrix, example),
    )


@dataclass(frozen=True)
class EvalArtifacts:
    csv: str
    json: str
    svgs: dict[str, str]


def eval_artifacts(
    handle: GeneratorHandle,
    examples: list[Example],
    config: RunConfig,
    input_hash: str,
) -> EvalArtifacts:
    methods = [Method(name) for name in config.methods]
    report = sweep(
        handle,
        examples,
        methods=methods,
        ratios=tuple(config.ratios),
        plan=build_plan(config),
        trials=config.trials,
        reduction=_reduction(config),
    )
    stamp = config.stamp()
    svgs = {}
    for metric in (Metric.PPLC_R, Metric.PPL_A):
        curves = [(m.value, report.aggregate_curve(m, metric)) for m in methods]
        svgs[metric.value] = curves_svg(curves, f"{metric.value} by removal/retention ratio")
    return EvalArtifacts(
        csv=report_csv(report),
        json=report_json(report, stamp, input_hash),
        svgs=svgs,
    )
