import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from largehom.rings import make_ideal, parse_ring

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def ring(vars_, relations, p=5):
    return parse_ring(f"p = {p}\nvars = {vars_}\nrelations = {relations}")


def ideal(R, gens):
    return make_ideal(R, gens)


E2 = ("x, y, z", "x^2, y^2, z^2")
NONGOLOD = ("x, y, z", "x^2, x*y, x*z, y^2, z^2")
SQUARE = ("x, y", "x^2, y^2")
CUBE = ("x, y", "x^2, x*y, y^2")
DUAL = ("x", "x^2")
GORENSTEIN = ("x, y", "x^2 - y^2, x*y")


@pytest.fixture
def e2():
    return ring(*E2)


@pytest.fixture
def nongolod():
    return ring(*NONGOLOD)


@pytest.fixture
def square():
    return ring(*SQUARE)


@pytest.fixture
def cube():
    return ring(*CUBE)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
