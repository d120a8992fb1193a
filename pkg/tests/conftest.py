import numpy as np
import pytest

from lerg.models.additive import AdditiveToyModel, AdditiveToySpec
from lerg.models.ngram import train_ngram
from lerg.types import Example, SegmentedText

# three hand-sized dialogues; every frozen probability in the suite was
# derived from these by exact arithmetic
TINY_DIALOGUES = (
    ("d1", "how are you", "i am fine"),
    ("d2", "hello there", "hi friend"),
    ("d3", "are you ok", "i am ok"),
)


def make_example(context, response, example_id="ex"):
    return Example(
        context=SegmentedText.from_segments(list(context)),
        response=SegmentedText.from_segments(list(response)),
        id=example_id,
    )


def random_additive(rng, m, n, prefix="s"):
    """Random additive instance with full-input scores kept below zero
    and all masked scores above the probability floor."""
    weights = rng.uniform(-0.5, 0.4, size=(m, n))
    base = -(np.abs(weights).sum(axis=0) + 0.5)
    spec = AdditiveToySpec(
        base=tuple(float(b) for b in base),
        weights=tuple(tuple(float(w) for w in row) for row in weights),
        segments=tuple(f"{prefix}{i}" for i in range(m)),
    )
    example = make_example(spec.segments, [f"y{j}" for j in range(n)], f"{prefix}-example")
    return AdditiveToyModel(spec), example


@pytest.fixture(scope="session")
def tiny_corpus():
    return [make_example(c.split(), r.split(), i) for i, c, r in TINY_DIALOGUES]


@pytest.fixture(scope="session")
def tiny_model(tiny_corpus):
    return train_ngram(tiny_corpus)


@pytest.fixture(scope="session")
def toy_spec():
    return AdditiveToySpec(
        base=(-1.0, -2.0),
        weights=((0.5, -0.2), (0.1, 0.3)),
        segments=("alpha", "beta"),
    )


@pytest.fixture(scope="session")
def toy_model(toy_spec):
    return AdditiveToyModel(toy_spec)


@pytest.fixture(scope="session")
def toy_example():
    return make_example(("alpha", "beta"), ("y0", "y1"), "toy")
