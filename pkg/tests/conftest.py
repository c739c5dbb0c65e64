import numpy as np
import pytest

from torus_bie import Hole, Torus


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="slow; pass --run-slow to include")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def square():
    return Torus.square()


@pytest.fixture(scope="session")
def equilateral():
    return Torus.equilateral()


@pytest.fixture(params=["square", "equilateral"], scope="session")
def torus(request):
    return Torus.square() if request.param == "square" else Torus.equilateral()


@pytest.fixture(scope="session")
def two_circles():
    return [Hole.circle(0.7 + 0.5j, 0.1), Hole.circle(0.3 + 0.3j, 0.15)]


@pytest.fixture(scope="session")
def three_trefoils():
    return [Hole.trefoil(c, 0.1) for c in (0.7 + 0.5j, 0.3 + 0.3j, 0)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
