"""Session-scoped fixtures shared by the acceptance suite.

The synthetic corpus, its feature matrix, and a model trained on it are
expensive to build, so they are constructed once and reused. Each fixture
also reports how long its build took; the acceptance tests fold that into
their runtime budgets.
"""

import time

import numpy as np
import pytest

from burnscan.features import encode_batch
from burnscan.mlp import train
from burnscan.synth import make_corpus

CORPUS_SEED = 42
TRAIN_SEED = 7


@pytest.fixture(scope="session")
def corpus42():
    t0 = time.perf_counter()
    corpus = make_corpus(CORPUS_SEED)
    return corpus, time.perf_counter() - t0


@pytest.fixture(scope="session")
def features42(corpus42):
    corpus, build_secs = corpus42
    t0 = time.perf_counter()
    X = encode_batch(corpus.addresses)
    y = np.asarray(corpus.labels)
    return X, y, build_secs + (time.perf_counter() - t0)


@pytest.fixture(scope="session")
def model42(features42):
    X, y, _ = features42
    t0 = time.perf_counter()
    model = train(X, y, seed=TRAIN_SEED)
    return model, time.perf_counter() - t0
