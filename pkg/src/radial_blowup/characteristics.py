"""
Lagrangian shell oracle for pressureless flow.

Each shell follows ``dr/dt = V``, ``dV/dt = alpha(N) delta m / r**(N-1)``
with its enclosed mass ``m`` frozen at the initial value.  Radial shells
cannot exchange mass before they cross, so the oracle is exact (up to the
integrator) on ``[0, first_crossing_time]`` and makes no claim afterwards.
It never touches the finite-volume solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radial_blowup.errors import InsufficientDataError, OracleNotApplicableError
from radial_blowup.field import enclosed_integral
from radial_blowup.model import FluidState, ModelParams, alpha

DEFAULT_STEPS = 10_000
MAX_RECORDS = 256
_BISECTIONS = 60


@dataclass(frozen=True, eq=False)
class CharacteristicFan:
    r0: np.ndarray
    times: np.ndarray
    r: np.ndarray  # (len(times), shells)
    v: np.ndarray
    enclosed: np.ndarray
    first_crossing_time: float | None
    origin_collapse_time: float | None = None
    exit_time: float | None = None

    @property
    def blowup_time(self) -> float | None:
        """Earliest of crossing and origin collapse."""
        times = [t for t in (self.first_crossing_time, self.origin_collapse_time) if t is not None]
        return min(times) if times else None


def crossing_time_free(r0, v0) -> float | None:
    """First crossing time of free-streaming shells.

    Minimum of ``-(r0[j+1] - r0[j]) / (v0[j+1] - v0[j])`` over adjacent pairs
    that approach each other; ``None`` if no pair does.
    """
    r0 = np.asarray(r0, dtype=np.float64)
    v0 = np.asarray(v0, dtype=np.float64)
    if r0.size < 2 or r0.size != v0.size:
        raise InsufficientDataError("need at least two shells with matching velocities")
    dr0 = np.diff(r0)
    dv0 = np.diff(v0)
    closing = dv0 < 0
    if not np.any(closing):
        return None
    return float(np.min(-dr0[closing] / dv0[closing]))


def _rhs(r, v, coef, N):
    if coef is None:
        return v, np.zeros_like(v)
    return v, coef / r ** (N - 1)


def _rk4(r, v, h, coef, N):
    k1r, k1v = _rhs(r, v, coef, N)
    k2r, k2v = _rhs(r + 0.5 * h * k1r, v + 0.5 * h * k1v, coef, N)
    k3r, k3v = _rhs(r + 0.5 * h * k2r, v + 0.5 * h * k2v, coef, N)
    k4r, k4v = _rhs(r + h * k3r, v + h * k3v, coef, N)
    return (r + h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r),
            v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v))


def _event(r):
    """0 = fine, 1 = adjacent shells met, 2 = a shell reached the origin."""
    if np.any(r <= 0):
        return 2
    if np.any(np.diff(r) <= 0):
        return 1
    return 0


def evolve_fan(state0: FluidState, params: ModelParams, dt: float | None = None,
               t_max: float = 1.0) -> CharacteristicFan:
    """Integrate one shell per cell centre of ``state0`` with classical RK4.

    The default step is the free crossing estimate (or ``t_max``) divided by
    10**4.  The first crossing or origin collapse is located by bisection on
    the bracketing step, after which integration stops.  At most about
    ``MAX_RECORDS`` evenly spaced steps are kept in the returned arrays, plus
    the final one.
    """
    if params.K > 0:
        raise OracleNotApplicableError("characteristic oracle requires K = 0")
    if params.delta not in (0, 1):
        raise OracleNotApplicableError("characteristic oracle requires delta in {0, 1}")
    grid = state0.grid
    r = grid.centers.copy()
    v = np.array(state0.v, dtype=np.float64)
    if r.size < 2:
        raise InsufficientDataError("need at least two shells")
    m = enclosed_integral(grid, state0.rho, params.N)
    coef = None
    if params.delta != 0 and np.any(m > 0):
        # half-cell correction: each shell sits at its cell centre
        m_center = m - 0.5 * state0.rho * grid.geometric_volumes(params.N)
        coef = alpha(params.N) * params.delta * m_center
    if dt is None:
        estimate = crossing_time_free(r, v)
        base = t_max if estimate is None else min(estimate, t_max)
        dt = (base if base > 0 else 1.0) / DEFAULT_STEPS
    if not dt > 0:
        raise ValueError("dt must be > 0")

    record_every = max(1, int(np.ceil(t_max / dt)) // MAX_RECORDS)
    times = [0.0]
    rs = [r.copy()]
    vs = [v.copy()]
    crossing = collapse = exit_time = None
    t = 0.0
    count = 0
    while t < t_max * (1 - 1e-14):
        h = min(dt, t_max - t)
        r_new, v_new = _rk4(r, v, h, coef, params.N)
        kind = _event(r_new)
        if kind:
            lo, hi = 0.0, h
            for _ in range(_BISECTIONS):
                mid = 0.5 * (lo + hi)
                if _event(_rk4(r, v, mid, coef, params.N)[0]):
                    hi = mid
                else:
                    lo = mid
            r_new, v_new = _rk4(r, v, hi, coef, params.N)
            t_event = t + hi
            kind = _event(r_new)
            if kind == 2:
                collapse = t_event
            else:
                crossing = t_event
            t = t_event
            r, v = r_new, v_new
            times.append(t)
            rs.append(r.copy())
            vs.append(v.copy())
            break
        r, v = r_new, v_new
        t += h
        count += 1
        if count % record_every == 0 or t >= t_max * (1 - 1e-14):
            times.append(t)
            rs.append(r.copy())
            vs.append(v.copy())
        if exit_time is None and np.any(r >= grid.R):
            exit_time = t

    return CharacteristicFan(
        r0=grid.centers,
        times=np.array(times),
        r=np.array(rs),
        v=np.array(vs),
        enclosed=m,
        first_crossing_time=crossing,
        origin_collapse_time=collapse,
        exit_time=exit_time,
    )
