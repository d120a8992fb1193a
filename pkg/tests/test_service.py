"""HTTP service tests, driven in-process through the ASGI test client.

The service must be numerically indistinguishable from the library: the
/score endpoint bit-equal to score_batch, /explain and /eval byte-equal
to the artifact strings the CLI writes for the same config.
"""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from lerg.config import ModelSpec, RunConfig
from lerg.explain.montecarlo import lerg_s
from lerg.models.additive import AdditiveToyModel, AdditiveToySpec
from lerg.models.base import score_batch
from lerg.models.remote import HttpTransport, RemoteModel, parse_handshake
from lerg.perturb import PerturbPlan
from lerg.report import content_hash_bytes
from lerg.runner import eval_artifacts, explain_artifacts
from lerg.service.app import create_app
from lerg.service.schemas import EvalRequest, ExplainRequest
from lerg.types import Method, SegmentedText


IN_PROCESS_SPEC = ModelSpec(kind="remote", endpoint="http://in-process")


@pytest.fixture(scope="module")
def client(tiny_model):
    return TestClient(create_app(tiny_model))


@pytest.fixture(scope="module")
def small_batch_client():
    spec = AdditiveToySpec(base=(-1.0,), weights=((-0.5,), (-0.25,)), segments=("alpha", "beta"))
    return TestClient(create_app(AdditiveToyModel(spec, max_batch=2)))


def request_hash(model):
    canonical = json.dumps(model.model_dump(mode="json"), sort_keys=True).encode("utf-8")
    return content_hash_bytes(canonical)


class TestHealthAndHandshake:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_handshake_fields(self, client, tiny_model):
        resp = client.get("/handshake")
        assert resp.status_code == 200
        body = resp.json()
        assert body["protocol"] == "lerg-score"
        assert body["version"] == 1
        assert body["normalized"] is True
        assert body["max_batch"] == tiny_model.manifest.max_batch
        assert isinstance(body["model"], str) and body["model"]

    def test_handshake_parses_as_remote_manifest(self, client, tiny_model):
        manifest = parse_handshake(client.get("/handshake").text)
        assert manifest.normalized == tiny_model.manifest.normalized
        assert manifest.max_batch == tiny_model.manifest.max_batch


class TestScore:
    def test_bit_equal_to_in_process_scoring(self, client, tiny_model):
        contexts = [["how", "are", "you"], ["are", "you"], []]
        response = ["i", "am"]
        resp = client.post("/score", json={"id": "r1", "contexts": contexts, "response": response})
        assert resp.status_code == 200
        body = resp.json()
        assert body["id"] == "r1"
        rows = score_batch(tiny_model, contexts, SegmentedText.from_segments(response))
        assert body["logprobs"] == [list(r.values) for r in rows]

    def test_empty_response_is_in_band_error(self, client):
        resp = client.post("/score", json={"id": "r2", "contexts": [["how"]], "response": []})
        assert resp.status_code == 200
        body = resp.json()
        assert body["id"] == "r2"
        assert body["error"]["code"] == "bad_request"
        assert "segment" in body["error"]["message"]

    def test_oversized_batch_is_in_band_error(self, small_batch_client):
        contexts = [["alpha"], ["beta"], ["alpha", "beta"]]
        resp = small_batch_client.post(
            "/score", json={"id": "r3", "contexts": contexts, "response": ["x"]}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["error"]["code"] == "bad_request"
        assert "max_batch" in body["error"]["message"]


EXPLAIN_PAYLOAD = {
    "example": {"id": "d1", "context": "how are you", "response": "i am fine"},
    "method": "lerg-s",
    "samples": 50,
    "max_mask_ratio": 0.5,
    "seed": 3,
    "segmenter": "whitespace",
}


def replicate_explain(handle, payload):
    request = ExplainRequest(**payload)
    config = RunConfig(
        model=IN_PROCESS_SPEC,
        methods=[request.method],
        samples=request.samples,
        max_mask_ratio=request.max_mask_ratio,
        seed=request.seed,
        segmenter=request.segmenter,
    )
    segment = SegmentedText.from_segments
    from lerg.types import Example

    example = Example(
        context=segment(payload["example"]["context"].split()),
        response=segment(payload["example"]["response"].split()),
        id=payload["example"]["id"],
    )
    return explain_artifacts(handle, example, Method(request.method), config, request_hash(request))


class TestExplain:
    def test_reply_matches_in_process_artifacts(self, client, tiny_model):
        resp = client.post("/explain", json=EXPLAIN_PAYLOAD)
        assert resp.status_code == 200
        body = resp.json()
        expected = replicate_explain(tiny_model, EXPLAIN_PAYLOAD)
        assert body["example_id"] == "d1"
        assert body["method"] == "lerg-s"
        assert body["csv"] == expected.csv
        assert body["svg"] == expected.svg
        assert body["json_report"] == json.loads(expected.json)
        phi = np.asarray(body["json_report"]["phi"])
        assert phi.shape == (3, 3)

    def test_deterministic_across_calls(self, client):
        first = client.post("/explain", json=EXPLAIN_PAYLOAD).json()
        second = client.post("/explain", json=EXPLAIN_PAYLOAD).json()
        assert first == second

    def test_unknown_method_400(self, client):
        payload = dict(EXPLAIN_PAYLOAD, method="bogus")
        resp = client.post("/explain", json=payload)
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "ValidationError"
        assert body["exit_code"] == 1
        assert "unknown method" in body["message"]

    def test_random_method_400(self, client):
        resp = client.post("/explain", json=dict(EXPLAIN_PAYLOAD, method="random"))
        assert resp.status_code == 400
        assert "random" in resp.json()["message"]

    def test_bad_samples_400(self, client):
        resp = client.post("/explain", json=dict(EXPLAIN_PAYLOAD, samples=0))
        assert resp.status_code == 400
        assert "samples" in resp.json()["message"]


EVAL_PAYLOAD = {
    "corpus": [
        {"id": "d1", "context": "how are you", "response": "i am fine"},
        {"id": "d2", "context": "hello there", "response": "hi friend"},
        {"id": "d3", "context": "are you ok", "response": "i am ok"},
    ],
    "methods": ["lerg-s", "random"],
    "ratios": [0.2, 0.4],
    "samples": 40,
    "max_mask_ratio": 0.5,
    "seed": 1,
    "trials": 2,
    "segmenter": "whitespace",
}


class TestEval:
    def test_reply_matches_in_process_artifacts(self, client, tiny_model):
        resp = client.post("/eval", json=EVAL_PAYLOAD)
        assert resp.status_code == 200
        body = resp.json()
        request = EvalRequest(**EVAL_PAYLOAD)
        config = RunConfig(
            model=IN_PROCESS_SPEC,
            methods=list(request.methods),
            samples=request.samples,
            max_mask_ratio=request.max_mask_ratio,
            ratios=list(request.ratios),
            seed=request.seed,
            trials=request.trials,
            segmenter=request.segmenter,
        )
        from lerg.types import Example

        examples = [
            Example(
                context=SegmentedText.from_segments(row["context"].split()),
                response=SegmentedText.from_segments(row["response"].split()),
                id=row["id"],
            )
            for row in EVAL_PAYLOAD["corpus"]
        ]
        expected = eval_artifacts(tiny_model, examples, config, request_hash(request))
        assert body["csv"] == expected.csv
        assert body["json_report"] == json.loads(expected.json)
        assert body["svgs"] == expected.svgs
        assert set(body["svgs"]) == {"pplc-r", "ppl-a"}

    def test_deterministic_across_calls(self, client):
        first = client.post("/eval", json=EVAL_PAYLOAD).json()
        second = client.post("/eval", json=EVAL_PAYLOAD).json()
        assert first == second

    def test_unnormalized_model_400(self, small_batch_client):
        resp = small_batch_client.post("/eval", json=EVAL_PAYLOAD)
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "ValidationError"
        assert "normalized" in body["message"]

    def test_unknown_method_400(self, client):
        resp = client.post("/eval", json=dict(EVAL_PAYLOAD, methods=["bogus"]))
        assert resp.status_code == 400
        assert "unknown method" in resp.json()["message"]


class TestServiceAsRemoteModel:
    def test_scores_match_direct_handle(self, client, tiny_model):
        remote = RemoteModel(HttpTransport("http://testserver", client=client))
        got = remote.score_segments(["how", "are", "you"], ["i", "am"])
        direct = tiny_model.score_segments(["how", "are", "you"], ["i", "am"])
        assert got == [float(v) for v in direct]

    def test_matrix_through_wire_matches_in_process(self, client, tiny_model, tiny_corpus):
        remote = RemoteModel(HttpTransport("http://testserver", client=client))
        example = tiny_corpus[0]
        plan = PerturbPlan(seed=5, sample_count=64, max_masked_ratio=0.5)
        over_wire = lerg_s(remote, example, plan)
        in_process = lerg_s(tiny_model, example, plan)
        assert np.max(np.abs(over_wire.phi - in_process.phi)) <= 1e-12
        assert over_wire.method == in_process.method
        assert over_wire.sample_count == in_process.sample_count
        assert over_wire.seed == in_process.seed
