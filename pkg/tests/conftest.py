"""
Shared fixtures for the rank test suite
"""

import numpy as np
import pytest

from app.models.dataset import IncompleteDataset
from app.models.reports import BootstrapConfig

from .oracles import random_dataset_rows


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_dataset():
    """a=2 groups, d=3 occasions, a few values missing, one tie"""
    return IncompleteDataset.from_rows([
        [
            [1.2, 2.0, None],
            [0.4, 1.1, 2.5],
            [3.3, None, 1.9],
            [2.0, 2.8, 3.1],
        ],
        [
            [4.1, 3.9, 5.0],
            [None, 2.2, 4.4],
            [2.7, 3.6, 3.0],
            [5.2, 4.8, None],
            [3.8, 2.0, 4.9],
        ],
    ], group_labels=("control", "treated"))


@pytest.fixture
def make_dataset():
    """Factory for random incomplete datasets with >= 2 observations per cell"""
    def factory(seed, group_sizes=(6, 7), d=3, missing_rate=0.2, tie_rate=0.0):
        rows = random_dataset_rows(np.random.default_rng(seed), group_sizes, d, missing_rate, tie_rate)
        return IncompleteDataset.from_rows(rows), rows
    return factory


@pytest.fixture
def quick_bootstrap():
    return BootstrapConfig(replicates=50, seed=7, threads=1, chunk_size=16)
