import numpy as np
import pytest

from dctpurify.defense import make_corpus, train


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def harness():
    """Toy classifier and held-out corpus used by the defense tests."""
    return train(make_corpus(400, seed=1)), make_corpus(300, seed=2)
