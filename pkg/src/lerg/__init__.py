"""Model-agnostic explanation of conditional text generation.

Given any model that can score a response token-by-token under partial
inputs, this package estimates which input segments drive each output
segment (several estimators, from local surrogate regressions to exact
subset enumeration) and evaluates saliency faithfulness by deleting or
retaining the segments an explanation flags.
"""

from .errors import (
    DegenerateInput,
    DomainError,
    EmptyCorpus,
    EmptyFile,
    EmptyText,
    LergError,
    ModelProtocolError,
    ParseError,
    ReferenceUnderflow,
    RemoteUnavailable,
    ScoreDomainError,
    SingularSystem,
    TooLarge,
    ValidationError,
)
from .evaluation import (
    Baseline,
    CorpusReport,
    Metric,
    MetricCurve,
    ppl_a,
    pplc_r,
    random_baseline_curve,
    sweep,
)
from .explain import (
    SubsetConvention,
    exact_lerg_s,
    exact_shapley,
    fit_lerg_l,
    fit_lime,
    lerg_s,
    run_method,
    sampled_shapley,
    top_k_segments,
)
from .perturb import PerturbPlan
from .segmentation import register_segmenter, segment_whitespace
from .types import (
    Example,
    ExplanationMatrix,
    Mask,
    Method,
    Reduction,
    Saliency,
    SegmentedText,
    StepLogProbs,
)

__version__ = "0.1.0"

__all__ = [
    "PerturbPlan",
    "Example",
    "ExplanationMatrix",
    "Mask",
    "Method",
    "Reduction",
    "Saliency",
    "SegmentedText",
    "StepLogProbs",
    "SubsetConvention",
    "Metric",
    "Baseline",
    "MetricCurve",
    "CorpusReport",
    "fit_lime",
    "fit_lerg_l",
    "lerg_s",
    "sampled_shapley",
    "exact_shapley",
    "exact_lerg_s",
    "run_method",
    "top_k_segments",
    "pplc_r",
    "ppl_a",
    "random_baseline_curve",
    "sweep",
    "segment_whitespace",
    "register_segmenter",
    "LergError",
    "ValidationError",
    "EmptyText",
    "EmptyCorpus",
    "EmptyFile",
    "ParseError",
    "DegenerateInput",
    "DomainError",
    "SingularSystem",
    "ReferenceUnderflow",
    "ScoreDomainError",
    "TooLarge",
    "RemoteUnavailable",
    "ModelProtocolError",
    "__version__",
]
