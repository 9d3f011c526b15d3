"""Shared pytest fixtures."""

import numpy as np
import pytest

from results.store import ResultStore


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def store(tmp_path):
    return ResultStore(tmp_path / "results")
