import numpy as np
import pytest

from analysis.data import DataSetTable


@pytest.fixture
def rng():
    return np.random.default_rng(20170406)


@pytest.fixture(scope='session')
def table():
    return DataSetTable.load()
