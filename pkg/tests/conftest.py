import numpy as np
import pytest

from layerpot_explorer_py.geometry.curve import make_circle, make_ellipse, make_kite
from layerpot_explorer_py.geometry.grid import Grid
from layerpot_explorer_py.kernel.derivative_table import init_derivative_table


@pytest.fixture(scope="session", autouse=True)
def derivative_table():
    return init_derivative_table(8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_circle():
    return make_circle(1.0)


@pytest.fixture
def ellipse():
    return make_ellipse(2.0, 1.0)


@pytest.fixture(params=["circle", "ellipse", "kite"])
def test_curve(request):
    return {"circle": make_circle(1.0), "ellipse": make_ellipse(2.0, 1.0), "kite": make_kite()}[request.param]


@pytest.fixture
def circle_grid(unit_circle):
    return Grid(unit_circle, 128)
