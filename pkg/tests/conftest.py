import sys

import pytest

from urbanqd.benchmark import empty_plot, grid_city
from urbanqd.geometry import Polygon
from urbanqd.layout import Building, UrbanLayout


@pytest.fixture
def city():
    return grid_city()


@pytest.fixture
def static_city():
    return grid_city(n_static=20)


@pytest.fixture
def empty():
    return empty_plot()


def square(x, y, s=1.0):
    return Polygon.rectangle(x, y, x + s, y + s)


def make_layout(specs, extent=100.0, grid=(2, 2)):
    """specs: iterable of (x, y, size, height[, static])."""
    bs = []
    for k, spec in enumerate(specs):
        x, y, s, h = spec[:4]
        st = spec[4] if len(spec) > 4 else False
        bs.append(Building(k, square(x, y, s), h, st))
    return UrbanLayout(Polygon.rectangle(0, 0, extent, extent), tuple(bs), grid)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
