# 3rd-party imports
import numpy as np
import pytest

# project imports
from symspin.charts.flat import build_flat_chart
from symspin.charts.sphere import build_sphere_chart
from symspin.fock import FockModel
from symspin.settings_manager import settings_manager
from symspin.symalg import standard_space


# (l, N) pairs the algebraic tests run on
MODEL_SIZES = [(1, 8), (1, 16), (2, 8)]


@pytest.fixture(autouse=True)
def default_tolerances():
    settings_manager.reset()
    yield
    settings_manager.reset()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=MODEL_SIZES, ids=lambda size: f'l{size[0]}-N{size[1]}')
def model(request):
    return FockModel(*request.param)


@pytest.fixture
def space(model):
    return standard_space(model.l)


@pytest.fixture
def flat_chart():
    return build_flat_chart(1, 9, 1.0)


@pytest.fixture
def sphere_chart():
    return build_sphere_chart(1.0, 49, 8, np.pi / 8)


@pytest.fixture
def fine_sphere_chart():
    return build_sphere_chart(1.0, 97, 8, np.pi / 8)
