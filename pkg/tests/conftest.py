import numpy as np
import pytest

from model.margins import Margins
from tests.helpers import STAIRCASE_R, STAIRCASE_C


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv('BCT_SEED', raising=False)


@pytest.fixture
def staircase():
    return Margins.from_vectors(STAIRCASE_R, STAIRCASE_C)


@pytest.fixture
def square():
    return Margins.from_vectors([2, 2], [2, 2])


@pytest.fixture
def instance_rng():
    return np.random.default_rng(20240607)
