import numpy as np
import pytest

from rigidcmap import FiberPoint
from rigidcmap.fixtures import path
from rigidcmap.jets import load_prepotential

# name -> (fixture file, center of the base sample, base radius)
SAMPLING = {
    "quadratic_n3": ("quadratic_n3.json", 0.0, 1.0),
    "split_k1_n3": ("split_k1_n3.json", 0.0, 1.0),
    "cubic_n1": ("cubic_n1.json", 1.0j, 0.5),
    "stu_chart_n3": ("stu_chart_n3.json", 1.0j, 0.3),
}


def load(name):
    return load_prepotential(path(SAMPLING[name][0] if name in SAMPLING else name))


def fiber_points(name, count=20, seed=0, fiber_radius=1.0):
    """Seeded fiber points for a named fixture."""
    F = load(name)
    _, center, radius = SAMPLING[name]
    rng = np.random.default_rng(seed)
    d = F.dim
    out = []
    for _ in range(count):
        z = center + radius * (rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d))
        w = fiber_radius * (rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d))
        out.append(FiberPoint(z, w))
    return out


@pytest.fixture
def cubic():
    return load("cubic_n1")


@pytest.fixture
def quadratic3():
    return load("quadratic_n3")


@pytest.fixture
def stu_chart():
    return load("stu_chart_n3")


@pytest.fixture
def stu_cone():
    return load_prepotential(path("stu_cone.json"))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
