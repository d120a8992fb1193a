"""Deletion/retention faithfulness metrics and the corpus sweep harness.

Two quantities, both exponentiated mean per-token log-likelihoods over
the response (length N):

  removal score   exp( mean_j [ log P(y_j | x)   - log P(y_j | x_R) ] )
  retention score exp( -mean_j  log P(y_j | x_A) )

x_R deletes the selected segments (order preserved), x_A keeps only the
selected segments (order preserved). A faithful saliency makes the
removal score large (deleting what it flags hurts likelihood) and the
retention score small (keeping what it flags suffices).

Unlike the estimators, metrics clamp step probabilities at the 1e-12
floor instead of raising; every clamp is counted and reported. Raw
token-level sums ride along with every value so any aggregate can be
recomposed or re-normalized after the fact.

Corpus aggregation is a token-weighted mean of the log quantities
(exponentiated at the end); a per-example arithmetic mean is emitted
alongside. Aggregation reduces in example-id order whatever the
evaluation order was, and per-example sampling seeds are derived from
the example id, so corpus reordering cannot change any reported number.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .constants import LOG_PROB_FLOOR
from .errors import DegenerateInput, DomainError, LergError, ValidationError
from .explain.dispatch import run_method
from .explain.saliency import selection_size, top_k_segments
from .models.base import GeneratorHandle, score
from .perturb import PerturbPlan
from .rng import derive_rng, stable_seed
from .types import Example, Method, Reduction, Saliency

log = logging.getLogger("lerg.eval")

DEFAULT_RATIOS = (0.1, 0.2, 0.3, 0.4, 0.5)


class Metric(enum.Enum):
    PPLC_R = "pplc-r"
    PPL_A = "ppl-a"


class Baseline(enum.Enum):
    METHOD = "method"
    RANDOM = "random"


@dataclass(frozen=True)
class TokenSums:
    """Raw per-example log-likelihood sums behind one metric value."""

    example_id: str
    n_tokens: int
    sum_full: float
    sum_variant: float
    clamped: int

    def value(self, metric: Metric) -> float:
        if metric is Metric.PPLC_R:
            return math.exp((self.sum_full - self.sum_variant) / self.n_tokens)
        return math.exp(-self.sum_variant / self.n_tokens)


@dataclass(frozen=True)
class MetricSample:
    """One (example, method, metric, ratio) cell of a sweep.

    ``sums`` has one entry for saliency-driven selection and one per
    trial for the random baseline; ``value`` is always the mean of the
    per-entry values, so it is recomputable from ``sums`` alone.
    """

    example_id: str
    method: Method
    metric: Metric
    ratio: float
    value: float
    sums: tuple[TokenSums, ...]


@dataclass(frozen=True)
class MetricCurve:
    ratios: tuple[float, ...]
    values: tuple[float, ...]
    metric: Metric
    baseline: Baseline

    def __post_init__(self):
        if len(self.ratios) != len(self.values):
            raise ValidationError("curve ratios and values must align")
        prev = 0.0
        for r in self.ratios:
            if not prev < r <= 1.0:
                raise ValidationError("curve ratios must be strictly increasing in (0, 1]")
            prev = r
        for v in self.values:
            if not (math.isfinite(v) and v > 0):
                raise ValidationError("curve values must be positive and finite")


@dataclass(frozen=True)
class AggregateRow:
    method: Method
    metric: Metric
    ratio: float
    value: float
    example_mean: float
    n_examples: int
    n_tokens: int
    clamped: int


@dataclass(frozen=True)
class FailureRecord:
    example_id: str
    error: str
    message: str


@dataclass(frozen=True)
class CorpusReport:
    methods: tuple[Method, ...]
    metrics: tuple[Metric, ...]
    ratios: tuple[float, ...]
    seed: int
    samples: tuple[MetricSample, ...]
    aggregates: tuple[AggregateRow, ...]
    failures: tuple[FailureRecord, ...]

    def curve(self, example_id: str, method: Method, metric: Metric) -> MetricCurve:
        cells = [
            s for s in self.samples
            if s.example_id == example_id and s.method is method and s.metric is metric
        ]
        cells.sort(key=lambda s: s.ratio)
        baseline = Baseline.RANDOM if method is Method.RANDOM else Baseline.METHOD
        return MetricCurve(
            tuple(s.ratio for s in cells), tuple(s.value for s in cells), metric, baseline
        )

    def aggregate_curve(self, method: Method, metric: Metric) -> MetricCurve:
        rows = sorted(
            (r for r in self.aggregates if r.method is method and r.metric is metric),
            key=lambda r: r.ratio,
        )
        baseline = Baseline.RANDOM if method is Method.RANDOM else Baseline.METHOD
        return MetricCurve(
            tuple(r.ratio for r in rows), tuple(r.value for r in rows), metric, baseline
        )


def _clamped_sum(handle: GeneratorHandle, context_segments: Sequence[str], example: Example) -> tuple[float, int]:
    values = score(handle, context_segments, example.response).as_array()
    clamped = int(np.sum(values < LOG_PROB_FLOOR))
    return float(np.maximum(values, LOG_PROB_FLOOR).sum()), clamped


def removal_sums(handle: GeneratorHandle, example: Example, removed: Sequence[int]) -> TokenSums:
    """Score the full input and the input minus ``removed`` indices."""
    segments = example.context.segments
    sum_full, clamped_full = _clamped_sum(handle, segments, example)
    removed_set = set(removed)
    kept = [seg for i, seg in enumerate(segments) if i not in removed_set]
    if removed_set and not kept:
        raise DegenerateInput(f"removal empties the context of example {example.id!r}")
    if not removed_set:
        sum_variant, clamped_variant = sum_full, clamped_full
    else:
        sum_variant, clamped_variant = _clamped_sum(handle, kept, example)
    return TokenSums(example.id, example.n, sum_full, sum_variant, clamped_full + clamped_variant)


def retention_sums(handle: GeneratorHandle, example: Example, kept: Sequence[int]) -> TokenSums:
    """Score the full input and the input reduced to ``kept`` indices."""
    segments = example.context.segments
    if not kept:
        raise DegenerateInput(f"retention needs at least one segment for example {example.id!r}")
    sum_full, clamped_full = _clamped_sum(handle, segments, example)
    kept_set = set(kept)
    retained = [seg for i, seg in enumerate(segments) if i in kept_set]
    sum_variant, clamped_variant = _clamped_sum(handle, retained, example)
    return TokenSums(example.id, example.n, sum_full, sum_variant, clamped_full + clamped_variant)


def pplc_r(handle: GeneratorHandle, example: Example, saliency: Saliency, ratio: float) -> float:
    """Removal score: likelihood drop from deleting the top-ratio segments."""
    if not 0.0 < ratio < 1.0:
        raise DomainError(f"removal ratio {ratio} outside (0, 1)")
    removed = top_k_segments(saliency, ratio)
    return removal_sums(handle, example, removed).value(Metric.PPLC_R)


def ppl_a(handle: GeneratorHandle, example: Example, saliency: Saliency, ratio: float) -> float:
    """Retention score: perplexity when keeping only the top-ratio segments."""
    if not 0.0 < ratio <= 1.0:
        raise DomainError(f"retention ratio {ratio} outside (0, 1]")
    kept = top_k_segments(saliency, ratio)
    return retention_sums(handle, example, kept).value(Metric.PPL_A)


def _metric_sums(handle: GeneratorHandle, example: Example, metric: Metric, indices: Sequence[int]) -> TokenSums:
    if metric is Metric.PPLC_R:
        return removal_sums(handle, example, indices)
    return retention_sums(handle, example, indices)


def _random_sums(
    handle: GeneratorHandle, example: Example, metric: Metric, ratio: float, trials: int, seed: int
) -> list[TokenSums]:
    k = selection_size(example.m, ratio)
    out = []
    for trial in range(trials):
        rng = derive_rng(seed, "random-baseline", example.id, metric.value, f"{ratio!r}", trial)
        indices = sorted(int(i) for i in rng.choice(example.m, size=k, replace=False))
        out.append(_metric_sums(handle, example, metric, indices))
    return out


def random_baseline_curve(
    handle: GeneratorHandle,
    example: Example,
    metric: Metric,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    trials: int = 10,
    seed: int = 0,
) -> MetricCurve:
    """Metric curve under uniformly random selections of matched size."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    values = []
    for ratio in ratios:
        sums = _random_sums(handle, example, metric, ratio, trials, seed)
        values.append(float(np.mean([s.value(metric) for s in sums])))
    return MetricCurve(tuple(ratios), tuple(values), metric, Baseline.RANDOM)


def sweep(
    handle: GeneratorHandle,
    corpus: Iterable[Example],
    methods: Sequence[Method],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    plan: PerturbPlan | None = None,
    metrics: Sequence[Metric] = (Metric.PPLC_R, Metric.PPL_A),
    trials: int = 10,
    reduction: Reduction = Reduction.SUM_OVER_J,
) -> CorpusReport:
    """Run every (method, metric, ratio) cell over a corpus and aggregate.

    A failing example is excluded from aggregation, logged, and recorded
    in the report's failure list with its id; it never disappears
    silently. Examples are processed independently; sampling seeds
    derive from example ids, and all reduction is in example-id order.
    """
    plan = plan or PerturbPlan(seed=0)
    examples = sorted(corpus, key=lambda e: e.id)
    if not examples:
        raise ValidationError("corpus is empty")
    samples: list[MetricSample] = []
    failures: list[FailureRecord] = []
    for example in examples:
        try:
            samples.extend(
                _example_samples(handle, example, methods, ratios, plan, metrics, trials, reduction)
            )
        except LergError as exc:
            log.warning("example %s failed: %s", example.id, exc)
            failures.append(FailureRecord(example.id, type(exc).__name__, str(exc)))
    aggregates = _aggregate(samples, methods, metrics, ratios)
    return CorpusReport(
        methods=tuple(methods),
        metrics=tuple(metrics),
        ratios=tuple(ratios),
        seed=plan.seed,
        samples=tuple(samples),
        aggregates=tuple(aggregates),
        failures=tuple(failures),
    )


def _example_samples(handle, example, methods, ratios, plan, metrics, trials, reduction):
    example_plan = dataclasses.replace(plan, seed=stable_seed(plan.seed, example.id))
    saliencies: dict[Method, Saliency] = {}
    for method in methods:
        if method is Method.RANDOM:
            continue
        matrix = run_method(handle, example, method, example_plan)
        saliencies[method] = Saliency.from_matrix(matrix, reduction)
    out = []
    for method in methods:
        for metric in metrics:
            for ratio in ratios:
                if method is Method.RANDOM:
                    sums = tuple(
                        _random_sums(handle, example, metric, ratio, trials, plan.seed)
                    )
                else:
                    indices = top_k_segments(saliencies[method], ratio)
                    sums = (_metric_sums(handle, example, metric, indices),)
                value = float(np.mean([s.value(metric) for s in sums]))
                out.append(MetricSample(example.id, method, metric, ratio, value, sums))
    return out


def _aggregate(samples, methods, metrics, ratios):
    rows = []
    for method in methods:
        for metric in metrics:
            for ratio in ratios:
                cell = [
                    s for s in samples
                    if s.method is method and s.metric is metric and s.ratio == ratio
                ]
                if not cell:
                    continue
                sums = [ts for s in cell for ts in s.sums]
                tokens = sum(ts.n_tokens for ts in sums)
                if metric is Metric.PPLC_R:
                    total = sum(ts.sum_full - ts.sum_variant for ts in sums)
                else:
                    total = -sum(ts.sum_variant for ts in sums)
                rows.append(
                    AggregateRow(
                        method=method,
                        metric=metric,
                        ratio=ratio,
                        value=math.exp(total / tokens),
                        example_mean=float(np.mean([s.value for s in cell])),
                        n_examples=len(cell),
                        n_tokens=tokens,
                        clamped=sum(ts.clamped for ts in sums),
                    )
                )
    return rows
