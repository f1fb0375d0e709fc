import numpy as np
import pytest

from radial_blowup.model import InitialProfile, ModelParams, RadialGrid, make_initial_state

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sine_state(cells, density=1.0, R=1.0):
    grid = RadialGrid(cells, R=R)
    return make_initial_state(InitialProfile(density_amplitude=density), grid)


def state_from(v, rho=None, R=1.0, t=0.0):
    from radial_blowup.model import FluidState

    v = np.asarray(v, dtype=float)
    grid = RadialGrid(v.size, R=R)
    rho = np.ones_like(v) if rho is None else np.asarray(rho, dtype=float)
    return FluidState(t=t, rho=rho, v=v, grid=grid)


@pytest.fixture
def params3():
    return ModelParams(N=3, delta=1, K=0.0, R=1.0, n=1.0)
