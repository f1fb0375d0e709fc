"""
Explicit finite-volume integrator for the radial Euler / Euler-Poisson system

    rho_t + V rho_r + rho V_r + (N-1) rho V / r = 0
    rho (V_t + V V_r) + P_r = rho Phi_r

Continuity is advanced in the area-weighted conservative form
``(r**(N-1) rho)_t + (r**(N-1) rho V)_r = 0`` and momentum as
``(rho V)_t + r**(1-N) (r**(N-1) rho V**2)_r = -P_r + rho Phi_r``, with Rusanov
(local Lax-Friedrichs) interface fluxes for the transport terms, a central
difference for the pressure gradient and forward Euler in time.

Boundaries: reflection at r = 0 (rho even, V odd); r >= R holds rho = 0,
V = 0.  The face at R is a no-slip wall, so no mass crosses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from radial_blowup.errors import ConfigurationError, NumericalOverflowError
from radial_blowup.field import radial_field
from radial_blowup.model import FluidState, ModelParams

TERMINATION_REASONS = ("t_max", "blowup_detected", "dt_underflow", "overflow")


@dataclass(frozen=True)
class SchemeConfig:
    """Numerical controls.

    ``density_floor`` is a fraction of the initial maximum density; cells
    falling below it are emptied (rho = 0, V = 0).  The gradient blowup proxy
    fires when ``max |dV/dr|`` exceeds the smaller of
    ``gradient_factor * (initial max gradient)`` and
    ``jump_fraction * (initial max |V|) / dr``; the second term caps the
    threshold at what the grid can resolve.
    """

    cfl: float = 0.5
    density_floor: float = 1e-12
    max_dt: float = 1e-2
    min_dt: float = 1e-12
    gradient_factor: float = 50.0
    jump_fraction: float = 0.1

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigurationError("must lie in (0, 1]", field="scheme.cfl")
        if not self.density_floor >= 0:
            raise ConfigurationError("must be >= 0", field="scheme.density_floor")
        if not 0 < self.min_dt < self.max_dt:
            raise ConfigurationError("need 0 < min_dt < max_dt", field="scheme.min_dt")
        if not self.gradient_factor > 0:
            raise ConfigurationError("must be > 0", field="scheme.gradient_factor")
        if not self.jump_fraction > 0:
            raise ConfigurationError("must be > 0", field="scheme.jump_fraction")

    def gradient_threshold(self, state0: FluidState) -> float:
        """Absolute gradient threshold derived from the initial state."""
        candidates = []
        g0 = max_velocity_gradient(state0)
        if g0 > 0:
            candidates.append(self.gradient_factor * g0)
        v0 = float(np.max(np.abs(state0.v))) if state0.v.size else 0.0
        if v0 > 0:
            candidates.append(self.jump_fraction * v0 / state0.grid.dr)
        return min(candidates) if candidates else math.inf


@dataclass(frozen=True)
class TimeStep:
    dt: float
    underflow: bool


@dataclass(frozen=True, eq=False)
class Trajectory:
    snapshots: tuple[FluidState, ...]
    termination: str
    steps: int = 0
    floor_activations: int = 0
    floor_mass_injected: float = 0.0
    support_reached_boundary: float | None = None
    gradient_threshold: float = math.inf
    overflow: str | None = None
    params: ModelParams | None = None
    scheme: SchemeConfig | None = field(default=None)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self) -> FluidState:
        return self.snapshots[-1]


def sound_speed(rho, K, gamma):
    """``sqrt(K gamma rho**(gamma-1))``; zero for pressureless gas."""
    rho = np.asarray(rho, dtype=np.float64)
    if K == 0:
        c = np.zeros_like(rho)
    else:
        c = np.sqrt(K * gamma * rho ** (gamma - 1))
    return float(c) if c.ndim == 0 else c


def max_velocity_gradient(state: FluidState) -> float:
    """Largest ``|dV/dr|`` between adjacent cells that both hold mass.

    Velocity is undefined in vacuum, so vacuum fronts do not count.
    """
    if state.v.size < 2:
        return 0.0
    occupied = (state.rho[:-1] > 0) & (state.rho[1:] > 0)
    if not np.any(occupied):
        return 0.0
    jumps = np.abs(np.diff(state.v))[occupied]
    return float(np.max(jumps)) / state.grid.dr


def cfl_dt(state: FluidState, params: ModelParams, scheme: SchemeConfig) -> TimeStep:
    """CFL-limited step, clamped to ``[min_dt, max_dt]``."""
    speed = float(np.max(np.abs(state.v) + sound_speed(state.rho, params.K, params.gamma)))
    if speed == 0:
        return TimeStep(scheme.max_dt, False)
    dt = scheme.cfl * state.grid.dr / speed
    if not dt >= scheme.min_dt:
        return TimeStep(scheme.min_dt, True)
    return TimeStep(min(dt, scheme.max_dt), False)


def _rusanov(rho_l, v_l, c_l, rho_r, v_r, c_r):
    a = np.maximum(np.abs(v_l) + c_l, np.abs(v_r) + c_r)
    m_l = rho_l * v_l
    m_r = rho_r * v_r
    f_mass = 0.5 * (m_l + m_r) - 0.5 * a * (rho_r - rho_l)
    f_mom = 0.5 * (m_l * v_l + m_r * v_r) - 0.5 * a * (m_r - m_l)
    return f_mass, f_mom


def _advance(state, params, scheme, dt, rho_floor):
    """One forward Euler step; returns (state, floored cells, injected mass).

    Injected mass is signed: emptying a cell with positive density removes
    mass and counts negative.
    """
    # overflow is detected explicitly below and reported with its cell
    with np.errstate(over="ignore", invalid="ignore"):
        return _euler_update(state, params, dt, rho_floor)


def _euler_update(state, params, dt, rho_floor):
    rho, v = state.rho, state.v
    mom = rho * v
    grid = state.grid
    N, K, gamma = params.N, params.K, params.gamma
    dr = grid.dr
    rho_e = np.concatenate(([rho[0]], rho, [0.0]))
    v_e = np.concatenate(([-v[0]], v, [0.0]))
    c_e = sound_speed(rho_e, K, gamma)

    f_mass, f_mom = _rusanov(rho_e[:-1], v_e[:-1], c_e[:-1], rho_e[1:], v_e[1:], c_e[1:])
    # no-slip wall at R: mirrored outer state, zero mass flux
    a_w = abs(v[-1]) + c_e[-2]
    f_mom[-1] = rho[-1] * v[-1] ** 2 + a_w * rho[-1] * v[-1]
    f_mass[0] = 0.0
    f_mass[-1] = 0.0

    area = grid.faces ** (N - 1)
    vol = grid.geometric_volumes(N)
    div_mass = (area[1:] * f_mass[1:] - area[:-1] * f_mass[:-1]) / vol
    div_mom = (area[1:] * f_mom[1:] - area[:-1] * f_mom[:-1]) / vol

    p_e = K * rho_e**gamma
    grad_p = (p_e[2:] - p_e[:-2]) / (2.0 * dr)
    force = rho * radial_field(grid, rho, params).phi_r

    rho_new = rho - dt * div_mass
    mom_new = mom - dt * (div_mom + grad_p - force)

    bad = ~(np.isfinite(rho_new) & np.isfinite(mom_new))
    if np.any(bad):
        cell = int(np.argmax(bad))
        for term, arr in (
            ("mass_flux", div_mass),
            ("momentum_flux", div_mom),
            ("pressure_gradient", grad_p),
            ("force", force),
        ):
            if not np.isfinite(arr[cell]):
                raise NumericalOverflowError(cell, term)
        raise NumericalOverflowError(cell, "update")

    floored = (rho_new < rho_floor) & (rho_new != 0.0)
    injected = float(np.sum(-rho_new[floored] * vol[floored]))
    rho_new[floored] = 0.0
    empty = rho_new <= 0.0
    rho_new[empty] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        v_new = np.where(empty, 0.0, mom_new / np.where(empty, 1.0, rho_new))
    if not np.all(np.isfinite(v_new)):
        raise NumericalOverflowError(int(np.argmax(~np.isfinite(v_new))), "velocity")
    new = FluidState(t=state.t + dt, rho=rho_new, v=v_new, grid=grid)
    return new, int(np.count_nonzero(floored)), injected


def step(state: FluidState, params: ModelParams, scheme: SchemeConfig, dt: float,
         rho_floor: float | None = None) -> FluidState:
    """Advance ``state`` by ``dt``.

    ``rho_floor`` is the absolute vacuum threshold; by default
    ``scheme.density_floor`` times the current maximum density.
    """
    if not dt > 0:
        raise ConfigurationError("time step must be > 0", field="dt")
    if rho_floor is None:
        rho_floor = scheme.density_floor * float(np.max(state.rho))
    return _advance(state, params, scheme, dt, rho_floor)[0]


def run(params: ModelParams, state0: FluidState, scheme: SchemeConfig, t_max: float,
        snapshot_cadence: float) -> Trajectory:
    """Integrate from ``state0`` until ``t_max`` or a blowup proxy fires.

    Snapshots are taken at multiples of ``snapshot_cadence`` and at
    termination.  Identical inputs give bit-identical trajectories.
    """
    grid = state0.grid
    if abs(grid.R - params.R) > 1e-12 * params.R:
        raise ConfigurationError(f"grid radius {grid.R} differs from R = {params.R}", field="R")
    if not t_max >= 0:
        raise ConfigurationError("must be >= 0", field="t_max")
    if not snapshot_cadence > 0:
        raise ConfigurationError("must be > 0", field="snapshot_cadence")

    threshold = scheme.gradient_threshold(state0)
    rho_floor = scheme.density_floor * float(np.max(state0.rho))
    snapshots = [state0]
    state = state0
    support_hit = state0.t if state0.rho[-1] > 0 else None
    steps = activations = 0
    injected = 0.0
    overflow = None
    k_next = 1
    termination = "t_max"

    while True:
        t = state.t
        if t >= t_max:
            break
        t_target = min(k_next * snapshot_cadence, t_max)
        ts = cfl_dt(state, params, scheme)
        if ts.underflow:
            termination = "dt_underflow"
            if snapshots[-1] is not state:
                snapshots.append(state)
            break
        dt = min(ts.dt, t_target - t)
        landing = t_target - (t + dt) <= 1e-12 * max(1.0, t_target)
        try:
            state, n_floor, inj = _advance(state, params, scheme, dt, rho_floor)
        except NumericalOverflowError as exc:
            termination = "overflow"
            overflow = str(exc)
            if snapshots[-1] is not state:
                snapshots.append(state)
            break
        if landing:
            state = state.replace(t=t_target)
        steps += 1
        activations += n_floor
        injected += inj
        if support_hit is None and state.rho[-1] > 0:
            support_hit = state.t
        if max_velocity_gradient(state) > threshold:
            termination = "blowup_detected"
            snapshots.append(state)
            break
        if landing:
            snapshots.append(state)
            if t_target >= k_next * snapshot_cadence * (1 - 1e-12):
                k_next += 1

    return Trajectory(
        snapshots=tuple(snapshots),
        termination=termination,
        steps=steps,
        floor_activations=activations,
        floor_mass_injected=injected,
        support_reached_boundary=support_hit,
        gradient_threshold=threshold,
        overflow=overflow,
        params=params,
        scheme=scheme,
    )
