import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ballneedlets import NeedletFrame

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


@pytest.fixture(scope="session")
def frame2():
    """Small product frame on the disk (levels 0..3)."""
    return NeedletFrame.build(2, 1.0, 3)


@pytest.fixture(scope="session")
def frame1():
    return NeedletFrame.build(1, 0.75, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ball_points(rng, count, d=2, boundary=0.2):
    """Random points of the closed ball with a share on or near the sphere."""
    x = rng.standard_normal((count, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    r = rng.uniform(0, 1, size=(count, 1)) ** (1.0 / d)
    edge = rng.uniform(size=count) < boundary
    r[edge, 0] = 1.0 - rng.uniform(0, 1e-3, size=edge.sum())
    return x * r


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
