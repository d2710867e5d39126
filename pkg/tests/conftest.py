import numpy as np
import pytest

from lmmgre.methods import METHOD_IDS, method_from_id


@pytest.fixture(params=METHOD_IDS)
def method(request):
    return method_from_id(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
