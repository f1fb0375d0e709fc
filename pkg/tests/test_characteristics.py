import math

import numpy as np
import pytest

from radial_blowup.characteristics import crossing_time_free, evolve_fan
from radial_blowup.errors import InsufficientDataError, OracleNotApplicableError
from radial_blowup.model import (
    FluidState,
    InitialProfile,
    ModelParams,
    RadialGrid,
    make_initial_state,
)

from conftest import sine_state


def test_free_crossing_examples():
    r = np.linspace(0.01, 1, 50)
    assert crossing_time_free(r, r) is None
    assert crossing_time_free(r, -r) == pytest.approx(1.0, rel=1e-12)


def test_free_crossing_sine_brute_force():
    r = np.linspace(0, 1, 20001)
    v = np.sin(math.pi * r)
    # brute force: every pair of shells, not only neighbours
    i, j = np.triu_indices(400, 1)
    rs, vs = r[::50], v[::50]
    closing = vs[j] < vs[i]
    brute = np.min((rs[j] - rs[i])[closing] / (vs[i] - vs[j])[closing])
    assert crossing_time_free(r, v) == pytest.approx(1 / math.pi, rel=1e-6)
    assert brute == pytest.approx(1 / math.pi, rel=1e-3)


def test_free_crossing_needs_two_shells():
    with pytest.raises(InsufficientDataError):
        crossing_time_free([0.5], [1.0])


def test_fan_rejects_pressure_and_attraction():
    s = sine_state(16)
    with pytest.raises(OracleNotApplicableError):
        evolve_fan(s, ModelParams(K=1.0, gamma=2.0))
    with pytest.raises(OracleNotApplicableError):
        evolve_fan(s, ModelParams(delta=-1))


def test_euler_fan_crossing_and_constant_velocity():
    s = sine_state(1024)
    fan = evolve_fan(s, ModelParams(delta=0), t_max=1.0)
    free = crossing_time_free(s.grid.centers, s.v)
    assert fan.first_crossing_time == pytest.approx(free, abs=free / 1e4)
    assert fan.first_crossing_time == pytest.approx(1 / math.pi, rel=1e-3)
    assert np.max(np.abs(fan.v - fan.v[0])) <= 1e-10 * np.max(np.abs(fan.v[0]))
    assert np.all(fan.r[0] == s.grid.centers)
    assert np.all(np.diff(fan.r[:-1], axis=1) > 0)


def test_massless_repulsive_fan_equals_euler():
    prof = InitialProfile(density_amplitude=0.0)
    s = make_initial_state(prof, RadialGrid(256))
    a = evolve_fan(s, ModelParams(delta=1), t_max=1.0)
    b = evolve_fan(s, ModelParams(delta=0), t_max=1.0)
    assert a.first_crossing_time == b.first_crossing_time
    assert np.array_equal(a.r, b.r)


def test_repulsive_fan_from_rest_expands():
    grid = RadialGrid(128)
    s = FluidState(t=0, rho=np.ones(128), v=np.zeros(128), grid=grid)
    fan = evolve_fan(s, ModelParams(N=3, delta=1), dt=1e-3, t_max=1.0)
    assert fan.first_crossing_time is None
    assert fan.exit_time is not None
    assert np.all(fan.v[1:] > 0)
    assert np.all(np.diff(fan.v, axis=0) >= 0)
    assert np.all(np.diff(fan.r, axis=1) > 0)


def test_repulsive_sine_fan_velocity_nondecreasing():
    s = sine_state(512, density=0.01)
    fan = evolve_fan(s, ModelParams(delta=1), t_max=1.0)
    assert fan.first_crossing_time is not None
    assert np.all(np.diff(fan.v, axis=0) >= -1e-15)
    assert fan.blowup_time == fan.first_crossing_time


def test_origin_collapse_reported():
    r = RadialGrid(64)
    s = FluidState(t=0, rho=np.zeros(64), v=-np.ones(64), grid=r)
    fan = evolve_fan(s, ModelParams(delta=0), dt=1e-3, t_max=1.0)
    assert fan.origin_collapse_time == pytest.approx(r.centers[0], rel=1e-9)
    assert fan.first_crossing_time is None
    assert fan.blowup_time == fan.origin_collapse_time
