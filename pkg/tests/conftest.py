import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from divfree_strichartz.fields import random_field
from divfree_strichartz.spectral_core import Grid, ScalarField

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

TWO_PI = 2 * math.pi


@pytest.fixture
def grid2():
    return Grid(2, 64)


@pytest.fixture
def grid3():
    return Grid(3, 32)


def plane_wave(grid, m):
    """``exp(i m.x)`` for an integer lattice vector ``m``."""
    return ScalarField.from_function(
        grid, lambda *x: np.exp(1j * sum(mj * grid.fundamental * xj for mj, xj in zip(m, x))))


def random_scalar(grid, seed, cutoff=None, real=True):
    return random_field(grid, seed, None, cutoff, real=real)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
