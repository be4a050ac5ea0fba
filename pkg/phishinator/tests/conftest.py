import os
import pathlib

import numpy as np
import pytest

from phishinator.dataset import Dataset, load_csv
from phishinator.schema import canonical_schema

DATA_DIR = pathlib.Path(__file__).parent / 'data'
SNAPSHOT_ENV = 'PHISH_DATASET'
BUNDLED_SNAPSHOT = (pathlib.Path(__file__).parent.parent / 'data'
                    / 'phishing_websites.csv')


def make_dataset(n=60, seed=0, n_informative=4, flip=.1):
    """Random ternary rows whose first columns carry the label.

    Labels alternate -1/+1 so both classes are always present.  Each
    informative column equals the label except for a ``flip`` fraction
    of rows, which are redrawn at random.
    """
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(n) % 2, 1, -1)
    X = rng.integers(-1, 2, size=(n, 30))
    for jj in range(n_informative):
        noisy = rng.random(n) < flip
        X[:, jj] = np.where(noisy, rng.integers(-1, 2, size=n), y)
    return Dataset(canonical_schema(), X, y, provenance='synthetic')


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def tiny():
    """Eight rows; feature 0 separates the classes, feature 1 half does."""
    X = np.zeros((8, 30), dtype=int)
    X[:, 0] = [-1, -1, -1, -1, 1, 1, 1, 1]
    X[:, 1] = [-1, 1, -1, 1, -1, 1, -1, 1]
    X[:, 2] = [0, 0, 1, 1, 0, 0, 1, 1]
    y = [-1, -1, -1, -1, 1, 1, 1, 1]
    return Dataset(canonical_schema(), X, y, provenance='tiny')


@pytest.fixture
def small():
    return make_dataset(n=60, seed=0)


@pytest.fixture
def medium():
    return make_dataset(n=200, seed=1, n_informative=6, flip=.2)


@pytest.fixture
def snapshot():
    """The 11,055-row public snapshot, when available."""
    path = os.environ.get(SNAPSHOT_ENV) or str(BUNDLED_SNAPSHOT)
    if not os.path.exists(path):
        pytest.skip('dataset snapshot not found (set %s)' % SNAPSHOT_ENV)
    return load_csv(path)
