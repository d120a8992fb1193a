import math
from fractions import Fraction

import numpy as np
import pytest

from lerg.errors import DomainError, EmptyCorpus, ValidationError
from lerg.models.base import _GenericMaskScorer, score
from lerg.models.ngram import BOS, OOV, NgramModel, train_ngram
from lerg.perturb import enumerate_all_masks, masks_to_matrix
from lerg.types import SegmentedText

from conftest import TINY_DIALOGUES, make_example
from fraction_oracle import FractionNgram


@pytest.fixture(scope="module")
def oracle():
    return FractionNgram([(c.split(), r.split()) for _, c, r in TINY_DIALOGUES])


def test_training_counts(tiny_model):
    # d2 contributes the only hi -> friend transition
    assert tiny_model.bigram["hi"]["friend"] == 1
    assert tiny_model.bigram[BOS] == {"i": 2, "hi": 1}
    # "are" occurs in d1 and d3, so it co-occurs with both responses
    assert tiny_model.assoc["are"] == {"i": 2, "am": 2, "fine": 1, "ok": 1}
    assert tiny_model.assoc["are"] == tiny_model.assoc["you"]


def test_vocabulary(tiny_model):
    assert tiny_model.vocab_size == 7
    assert tiny_model.vocab[-1] == OOV
    assert tiny_model.vocab == ("am", "fine", "friend", "hi", "i", "ok", OOV)


def test_frozen_first_step(tiny_model):
    # bigram: (2 + 1/2) / (3 + 7/2) = 5/13; assoc: (1/2 + 4) / (7/2 + 12) = 9/31
    # interpolated: 5/26 + 9/62 = 136/403
    got = tiny_model.score_segments(["are", "you"], ["i"])
    assert got[0] == pytest.approx(math.log(136 / 403), abs=1e-12)


def test_frozen_second_step(tiny_model):
    # prev = i: bigram (2 + 1/2) / (2 + 7/2) = 5/11, interpolated 5/22 + 9/62 = 127/341
    got = tiny_model.score_segments(["are", "you"], ["i", "am"])
    assert got[1] == pytest.approx(math.log(127 / 341), abs=1e-12)


def test_matches_exact_arithmetic_oracle(tiny_model, tiny_corpus, oracle):
    for example in tiny_corpus:
        for mask in enumerate_all_masks(example.m):
            kept = mask.apply(example.context.segments)
            got = tiny_model.score_segments(list(kept), list(example.response.segments))
            want = oracle.score(kept, list(example.response.segments))
            assert len(got) == len(want)
            for g, w in zip(got, want):
                assert g == pytest.approx(math.log(float(w)), abs=1e-12)


@pytest.mark.parametrize("prev", [BOS, "i", "hi", "never-seen"])
@pytest.mark.parametrize("context", [(), ("are", "you"), ("never-seen",)])
def test_step_distribution_sums_to_one(tiny_model, prev, context):
    probs = tiny_model.step_distribution(list(context), prev)
    assert probs.shape == (tiny_model.vocab_size,)
    assert np.all(probs > 0)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_lambda_zero_ignores_context(tiny_corpus):
    model = train_ngram(tiny_corpus, lam=0.0)
    response = ["i", "am", "fine"]
    base = model.score_segments([], response)
    assert model.score_segments(["how", "are", "you"], response) == base
    assert model.score_segments(["hello"], response) == base


def test_unknown_context_segment_adds_nothing(tiny_model):
    response = ["i", "am"]
    assert tiny_model.score_segments(["zzz"], response) == tiny_model.score_segments([], response)


def test_oov_response_token_uses_bucket(tiny_model):
    assert tiny_model.score_segments(["are"], ["zzz"]) == tiny_model.score_segments(["are"], [OOV])


def test_scores_are_normalized_log_probs(tiny_model, tiny_corpus):
    assert tiny_model.manifest.normalized is True
    for example in tiny_corpus:
        lp = score(tiny_model, example.context.segments, example.response)
        assert all(v < 0 for v in lp.values)


def test_fast_path_matches_generic_bitwise(tiny_model, tiny_corpus):
    for example in tiny_corpus:
        z = masks_to_matrix(enumerate_all_masks(example.m))
        fast = tiny_model.bind(example.context, example.response).score_matrix(z)
        generic = _GenericMaskScorer(tiny_model, example.context, example.response).score_matrix(z)
        assert np.array_equal(fast, generic)


def test_json_roundtrip_is_bit_identical(tiny_model):
    again = NgramModel.from_json(tiny_model.to_json())
    assert again.vocab == tiny_model.vocab
    assert again.bigram == tiny_model.bigram
    assert again.assoc == tiny_model.assoc
    rng = np.random.default_rng(0)
    pool = ["how", "are", "you", "hello", "there", "ok", "i", "am", "fine", "hi", "friend", "zzz"]
    for _ in range(100):
        context = list(rng.choice(pool, size=int(rng.integers(0, 4))))
        response = list(rng.choice(pool, size=int(rng.integers(1, 4))))
        assert again.score_segments(context, response) == tiny_model.score_segments(context, response)


class TestConstruction:
    def test_rejects_bad_smoothing(self, tiny_corpus):
        with pytest.raises(DomainError):
            train_ngram(tiny_corpus, k=0.0)
        with pytest.raises(DomainError):
            train_ngram(tiny_corpus, k=-1.0)

    def test_rejects_bad_interpolation(self, tiny_corpus):
        with pytest.raises(DomainError):
            train_ngram(tiny_corpus, lam=-0.1)
        with pytest.raises(DomainError):
            train_ngram(tiny_corpus, lam=1.1)

    def test_requires_oov_bucket(self):
        with pytest.raises(ValidationError):
            NgramModel(vocab=["a", "b"], bigram={}, assoc={})

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train_ngram([])

    def test_interpolation_endpoints_allowed(self, tiny_corpus):
        train_ngram(tiny_corpus, lam=0.0)
        train_ngram(tiny_corpus, lam=1.0)


def test_lambda_one_is_pure_association(tiny_corpus, oracle):
    model = train_ngram(tiny_corpus, lam=1.0)
    got = model.score_segments(["are"], ["i"])
    want = FractionNgram([(c.split(), r.split()) for _, c, r in TINY_DIALOGUES], lam=Fraction(1)).score(["are"], ["i"])
    assert got[0] == pytest.approx(math.log(float(want[0])), abs=1e-12)


def test_score_via_handle_interface(tiny_model):
    example = make_example(("how", "are", "you"), ("i", "am", "fine"), "d1")
    lp = score(tiny_model, example.context.segments, example.response)
    direct = tiny_model.score_segments(list(example.context.segments), list(example.response.segments))
    assert list(lp.values) == direct
