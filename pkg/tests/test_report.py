import csv
import io
import json

import numpy as np
import pytest

from lerg.evaluation import Baseline, Metric, MetricCurve, sweep
from lerg.explain.exact import exact_lerg_s
from lerg.perturb import PerturbPlan
from lerg.report.svg import curves_svg, heatmap_svg
from lerg.report.tables import (
    CORPUS_ROW_ID,
    content_hash_bytes,
    matrix_csv,
    matrix_json,
    report_csv,
    report_json,
)
from lerg.types import Method

CONFIG = {"methods": ["lerg-s"], "seed": 0}


@pytest.fixture(scope="module")
def matrix_and_example(tiny_model, tiny_corpus):
    example = tiny_corpus[0]
    return exact_lerg_s(tiny_model, example), example


@pytest.fixture(scope="module")
def report(tiny_model, tiny_corpus):
    return sweep(
        tiny_model,
        tiny_corpus,
        (Method.LERG_S, Method.RANDOM),
        ratios=(0.2, 0.5),
        plan=PerturbPlan(seed=0, sample_count=60),
        trials=2,
    )


class TestMatrixCsv:
    def test_header_and_shape(self, matrix_and_example):
        matrix, example = matrix_and_example
        text = matrix_csv(matrix, example)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["segment"] + list(example.response.segments)
        assert [r[0] for r in rows[1:]] == list(example.context.segments)

    def test_values_parse_back_exactly(self, matrix_and_example):
        matrix, example = matrix_and_example
        rows = list(csv.reader(io.StringIO(matrix_csv(matrix, example))))
        parsed = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
        assert np.array_equal(parsed, matrix.phi)

    def test_rerun_is_byte_identical(self, matrix_and_example):
        matrix, example = matrix_and_example
        assert matrix_csv(matrix, example) == matrix_csv(matrix, example)


class TestMatrixJson:
    def test_schema_and_content(self, matrix_and_example):
        matrix, example = matrix_and_example
        payload = json.loads(matrix_json(matrix, example, CONFIG, "sha256:abc"))
        assert payload["schema"] == 1
        assert payload["config"] == CONFIG
        assert payload["input_hash"] == "sha256:abc"
        assert payload["example_id"] == example.id
        assert payload["method"] == "exact-lerg-s"
        assert payload["sample_count"] == 0
        assert payload["context_segments"] == list(example.context.segments)
        assert payload["response_segments"] == list(example.response.segments)
        assert np.array_equal(np.array(payload["phi"]), matrix.phi)

    def test_ends_with_newline_and_sorted_keys(self, matrix_and_example):
        matrix, example = matrix_and_example
        text = matrix_json(matrix, example, CONFIG, "sha256:abc")
        assert text.endswith("}\n")
        keys = list(json.loads(text).keys())
        assert keys == sorted(keys)


class TestReportCsv:
    def test_columns_and_corpus_rows(self, report):
        rows = list(csv.reader(io.StringIO(report_csv(report))))
        assert rows[0] == ["example_id", "method", "metric", "ratio", "value"]
        corpus_rows = [r for r in rows[1:] if r[0] == CORPUS_ROW_ID]
        example_rows = [r for r in rows[1:] if r[0] != CORPUS_ROW_ID]
        assert len(example_rows) == len(report.samples)
        assert len(corpus_rows) == len(report.aggregates)
        # per-example rows come first, corpus rows last
        assert rows[1 + len(example_rows)][0] == CORPUS_ROW_ID

    def test_values_round_trip(self, report):
        rows = list(csv.reader(io.StringIO(report_csv(report))))
        for row, sample in zip(rows[1:], report.samples):
            assert float(row[3]) == sample.ratio
            assert float(row[4]) == sample.value

    def test_rerun_is_byte_identical(self, tiny_model, tiny_corpus, report):
        again = sweep(
            tiny_model,
            tiny_corpus,
            (Method.LERG_S, Method.RANDOM),
            ratios=(0.2, 0.5),
            plan=PerturbPlan(seed=0, sample_count=60),
            trials=2,
        )
        assert report_csv(again) == report_csv(report)


class TestReportJson:
    def test_recomposition_from_raw_sums(self, report):
        payload = json.loads(report_json(report, CONFIG, "sha256:abc"))
        assert payload["schema"] == 1
        for sample in payload["samples"]:
            values = []
            for sums in sample["sums"]:
                n = sums["n_tokens"]
                if sample["metric"] == "pplc-r":
                    values.append(np.exp((sums["sum_full_logprob"] - sums["sum_variant_logprob"]) / n))
                else:
                    values.append(np.exp(-sums["sum_variant_logprob"] / n))
            assert sample["value"] == pytest.approx(float(np.mean(values)), abs=1e-12)

    def test_aggregate_recomposition(self, report):
        payload = json.loads(report_json(report, CONFIG, "sha256:abc"))
        samples = payload["samples"]
        for row in payload["aggregates"]:
            cell = [
                s for s in samples
                if s["method"] == row["method"] and s["metric"] == row["metric"] and s["ratio"] == row["ratio"]
            ]
            sums = [ts for s in cell for ts in s["sums"]]
            tokens = sum(ts["n_tokens"] for ts in sums)
            if row["metric"] == "pplc-r":
                total = sum(ts["sum_full_logprob"] - ts["sum_variant_logprob"] for ts in sums)
            else:
                total = -sum(ts["sum_variant_logprob"] for ts in sums)
            assert row["n_tokens"] == tokens
            assert row["value"] == pytest.approx(float(np.exp(total / tokens)), abs=1e-12)

    def test_failures_serialized(self, report):
        payload = json.loads(report_json(report, CONFIG, "sha256:abc"))
        assert payload["failures"] == []


class TestHeatmapSvg:
    def test_structure(self, matrix_and_example):
        matrix, example = matrix_and_example
        svg = heatmap_svg(matrix, example)
        assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
        assert svg.endswith("</svg>\n")
        assert f"method={matrix.method.value} example={example.id}" in svg
        scale = float(abs(matrix.phi).max())
        assert f"display scaling: color = value / {scale:.2f} (max|value|)" in svg

    def test_every_cell_has_a_tooltip_with_full_precision(self, matrix_and_example):
        matrix, example = matrix_and_example
        svg = heatmap_svg(matrix, example)
        assert svg.count("<title>") == matrix.m * matrix.n
        for i, ctx in enumerate(example.context.segments):
            for j, resp in enumerate(example.response.segments):
                assert f"{ctx} / {resp}: {float(matrix.phi[i, j])!r}" in svg

    def test_axis_labels(self, matrix_and_example):
        matrix, example = matrix_and_example
        svg = heatmap_svg(matrix, example)
        assert svg.count("rotate(-45") == matrix.m
        for resp in example.response.segments:
            assert f'text-anchor="end">{resp}</text>' in svg

    def test_deterministic(self, matrix_and_example):
        matrix, example = matrix_and_example
        assert heatmap_svg(matrix, example) == heatmap_svg(matrix, example)


class TestCurvesSvg:
    def make_curves(self):
        a = MetricCurve((0.1, 0.3, 0.5), (1.0, 1.2, 1.5), Metric.PPLC_R, Baseline.METHOD)
        b = MetricCurve((0.1, 0.3, 0.5), (1.0, 1.05, 1.1), Metric.PPLC_R, Baseline.RANDOM)
        return [("lerg-s", a), ("random", b)]

    def test_one_polyline_per_curve_with_legend(self):
        svg = curves_svg(self.make_curves(), "removal score by ratio")
        assert svg.count("<polyline") == 2
        assert svg.count("<circle") == 6
        assert ">lerg-s</text>" in svg
        assert ">random</text>" in svg
        assert "removal score by ratio" in svg
        assert svg.endswith("</svg>\n")

    def test_tick_labels_cover_ratio_grid(self):
        svg = curves_svg(self.make_curves(), "t")
        for ratio in ("0.10", "0.30", "0.50"):
            assert f">{ratio}</text>" in svg

    def test_deterministic(self):
        assert curves_svg(self.make_curves(), "t") == curves_svg(self.make_curves(), "t")


def test_content_hash():
    assert content_hash_bytes(b"abc") == "sha256:" + "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    assert content_hash_bytes(b"") != content_hash_bytes(b"x")
