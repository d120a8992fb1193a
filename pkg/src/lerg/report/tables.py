"""CSV and JSON artifact writers.

Everything here is byte-deterministic: floats are serialized with
``repr`` (shortest round-trip form), JSON keys are sorted, and rows
follow the already-ordered report structures. Every artifact embeds the
run configuration and a content hash of the inputs it was computed
from, so a rerun can be checked for drift byte-for-byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from typing import Mapping

from ..evaluation import CorpusReport
from ..types import Example, ExplanationMatrix

CORPUS_ROW_ID = "__corpus__"


def content_hash_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def content_hash_file(path: str) -> str:
    with open(path, "rb") as fh:
        return content_hash_bytes(fh.read())


def _fmt(value: float) -> str:
    return repr(float(value))


def matrix_csv(matrix: ExplanationMatrix, example: Example) -> str:
    """Attribution matrix as CSV: one row per input segment, one column
    per response segment."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["segment"] + list(example.response.segments))
    for i, segment in enumerate(example.context.segments):
        writer.writerow([segment] + [_fmt(v) for v in matrix.phi[i]])
    return buf.getvalue()


def matrix_json(
    matrix: ExplanationMatrix, example: Example, config: Mapping, input_hash: str
) -> str:
    payload = {
        "schema": 1,
        "config": dict(config),
        "input_hash": input_hash,
        "example_id": example.id,
        "method": matrix.method.value,
        "sample_count": matrix.sample_count,
        "seed": matrix.seed,
        "context_segments": list(example.context.segments),
        "response_segments": list(example.response.segments),
        "phi": [[float(v) for v in row] for row in matrix.phi],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def report_csv(report: CorpusReport) -> str:
    """Sweep results as CSV with per-example rows, then corpus rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["example_id", "method", "metric", "ratio", "value"])
    for s in report.samples:
        writer.writerow([s.example_id, s.method.value, s.metric.value, _fmt(s.ratio), _fmt(s.value)])
    for row in report.aggregates:
        writer.writerow([CORPUS_ROW_ID, row.method.value, row.metric.value, _fmt(row.ratio), _fmt(row.value)])
    return buf.getvalue()


def report_json(report: CorpusReport, config: Mapping, input_hash: str) -> str:
    payload = {
        "schema": 1,
        "config": dict(config),
        "input_hash": input_hash,
        "seed": report.seed,
        "methods": [m.value for m in report.methods],
        "metrics": [m.value for m in report.metrics],
        "ratios": [float(r) for r in report.ratios],
        "samples": [
            {
                "example_id": s.example_id,
                "method": s.method.value,
                "metric": s.metric.value,
                "ratio": float(s.ratio),
                "value": float(s.value),
                "sums": [
                    {
                        "n_tokens": ts.n_tokens,
                        "sum_full_logprob": float(ts.sum_full),
                        "sum_variant_logprob": float(ts.sum_variant),
                        "clamped": ts.clamped,
                    }
                    for ts in s.sums
                ],
            }
            for s in report.samples
        ],
        "aggregates": [
            {
                "method": row.method.value,
                "metric": row.metric.value,
                "ratio": float(row.ratio),
                "value": float(row.value),
                "example_mean": float(row.example_mean),
                "n_examples": row.n_examples,
                "n_tokens": row.n_tokens,
                "clamped": row.clamped,
            }
            for row in report.aggregates
        ],
        "failures": [
            {"example_id": f.example_id, "error": f.error, "message": f.message}
            for f in report.failures
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
