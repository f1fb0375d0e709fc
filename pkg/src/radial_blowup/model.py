"""
Physical parameters, grid and state containers, the gamma-law equation of
state and initial-profile construction.

All containers are frozen dataclasses; array fields are stored as read-only
float64 copies so states can be shared between runs safely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from radial_blowup.errors import (
    ConfigurationError,
    InvalidDimensionError,
    NegativeDensityError,
    SupportViolationError,
)

# Velocity values below this (relative to the profile scale) count as zero at R.
SUPPORT_TOL = 1e-12


def _frozen(values):
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelParams:
    """Physical and theorem parameters.

    ``N`` is the spatial dimension, ``delta`` the force sign (0 Euler,
    +1 repulsive, -1 attractive), ``K``/``gamma`` the pressure law
    ``P = K rho**gamma``, ``n`` the moment weight exponent and ``R`` the
    support radius.
    """

    N: int = 3
    delta: int = 0
    K: float = 0.0
    gamma: float = 1.4
    n: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ConfigurationError("dimension must be an integer >= 1", field="N")
        if self.delta not in (-1, 0, 1):
            raise ConfigurationError("must be one of -1, 0, 1", field="delta")
        if not self.K >= 0:
            raise ConfigurationError("pressure constant must be >= 0", field="K")
        if not self.gamma >= 1:
            raise ConfigurationError("adiabatic exponent must be >= 1", field="gamma")
        if not self.n > 0:
            raise ConfigurationError("weight exponent must be > 0", field="n")
        if not self.R > 0:
            raise ConfigurationError("domain radius must be > 0", field="R")

    @property
    def theorem_applicable(self) -> bool:
        return self.delta in (0, 1) and (self.K == 0 or self.gamma > 1)


def alpha(N: int) -> float:
    """Return the Poisson constant for dimension ``N``.

    Normalised so that the Laplacian of the Green's function |x|, log|x|,
    -1/|x|**(N-2) equals ``alpha(N)`` times a unit point source.
    """
    if N < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {N}")
    if N == 1:
        return 2.0
    if N == 2:
        return 2.0 * math.pi
    return (N - 2) * 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def pressure(rho, K, gamma):
    """Gamma-law pressure ``K * rho**gamma``."""
    rho_arr = np.asarray(rho, dtype=np.float64)
    if np.any(rho_arr < 0):
        raise NegativeDensityError("pressure of negative density")
    p = K * rho_arr**gamma
    return float(p) if p.ndim == 0 else p


@dataclass(frozen=True)
class RadialGrid:
    """Cell-centred grid on [0, R] with ``cells`` uniform cells."""

    cells: int
    R: float = 1.0
    ghost_depth: int = 1

    def __post_init__(self):
        if isinstance(self.cells, bool) or int(self.cells) != self.cells or self.cells < 1:
            raise ConfigurationError("cell count must be a positive integer", field="cells")
        if not self.R > 0:
            raise ConfigurationError("domain radius must be > 0", field="R")
        if self.ghost_depth < 1:
            raise ConfigurationError("ghost depth must be >= 1", field="ghost_depth")

    @property
    def dr(self) -> float:
        return self.R / self.cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) * self.dr

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.cells + 1) * self.dr

    def geometric_volumes(self, N: int) -> np.ndarray:
        """Midpoint weights ``r_i**(N-1) * dr`` used for every radial integral."""
        return self.centers ** (N - 1) * self.dr


@dataclass(frozen=True, eq=False)
class FluidState:
    """Density and velocity cell values at time ``t``.

    The region r >= R is implicit and always holds rho = 0, V = 0.
    """

    t: float
    rho: np.ndarray
    v: np.ndarray
    grid: RadialGrid

    def __post_init__(self):
        rho = _frozen(self.rho)
        v = _frozen(self.v)
        if rho.shape != (self.grid.cells,) or v.shape != (self.grid.cells,):
            raise ConfigurationError(
                f"state arrays must have length {self.grid.cells}", field="state"
            )
        if not self.t >= 0:
            raise ConfigurationError("time must be >= 0", field="t")
        if np.any(rho < 0):
            i = int(np.argmax(rho < 0))
            raise NegativeDensityError(f"negative density {rho[i]!r} in cell {i}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "t", float(self.t))

    def geometric_mass(self, N: int) -> float:
        return float(np.sum(self.rho * self.grid.geometric_volumes(N)))

    def replace(self, **changes) -> "FluidState":
        kw = dict(t=self.t, rho=self.rho, v=self.v, grid=self.grid)
        kw.update(changes)
        return FluidState(**kw)


DENSITY_FAMILIES = ("uniform", "poly_bump", "tabulated")
VELOCITY_FAMILIES = ("sine", "poly_bump", "tabulated")


@dataclass(frozen=True)
class InitialProfile:
    """Initial density and velocity families.

    Density families
        ``uniform``: ``A`` everywhere on [0, R].
        ``poly_bump``: ``A (1 - (r/s)**2)**2`` for r < s, zero beyond.
        ``tabulated``: linear interpolation of ``table_rho`` on ``table_r``.
    Velocity families
        ``sine``: ``B sin(pi r / R)``.
        ``poly_bump``: ``B (r/s) (1 - (r/s)**2)**2`` for r < s, zero beyond.
        ``tabulated``: linear interpolation of ``table_v`` on ``table_r``.

    A support radius of ``None`` means R.  Zero amplitudes give rho = 0 or V = 0.
    The uniform density does not vanish at R; it is accepted as a vacuum-free
    background, and hypothesis validation flags it whenever pressure is present.
    """

    density: str = "uniform"
    density_amplitude: float = 1.0
    density_support: float | None = None
    velocity: str = "sine"
    velocity_amplitude: float = 1.0
    velocity_support: float | None = None
    table_r: tuple = field(default=())
    table_rho: tuple = field(default=())
    table_v: tuple = field(default=())

    def __post_init__(self):
        if self.density not in DENSITY_FAMILIES:
            raise ConfigurationError(
                f"unknown density family {self.density!r}", field="profile.density"
            )
        if self.velocity not in VELOCITY_FAMILIES:
            raise ConfigurationError(
                f"unknown velocity family {self.velocity!r}", field="profile.velocity"
            )
        if self.density_amplitude < 0:
            raise ConfigurationError("must be >= 0", field="profile.density_amplitude")
        for name in ("density_support", "velocity_support"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigurationError("must be > 0", field=f"profile.{name}")
        if "tabulated" in (self.density, self.velocity):
            r = np.asarray(self.table_r, dtype=float)
            if r.size < 2 or np.any(np.diff(r) <= 0):
                raise ConfigurationError(
                    "needs >= 2 strictly increasing radii", field="profile.table_r"
                )
            if self.density == "tabulated" and len(self.table_rho) != r.size:
                raise ConfigurationError("length must match table_r", field="profile.table_rho")
            if self.velocity == "tabulated" and len(self.table_v) != r.size:
                raise ConfigurationError("length must match table_r", field="profile.table_v")

    def _support(self, value, R):
        s = R if value is None else value
        if s > R * (1 + 1e-12):
            raise SupportViolationError(f"support radius {s} exceeds R={R}")
        return s

    def density_at(self, r, R):
        r = np.asarray(r, dtype=np.float64)
        A = self.density_amplitude
        if self.density == "uniform":
            return np.full_like(r, A)
        if self.density == "poly_bump":
            s = self._support(self.density_support, R)
            x = r / s
            return np.where(x < 1, A * (1 - x**2) ** 2, 0.0)
        return np.interp(r, self.table_r, self.table_rho, right=0.0)

    def velocity_at(self, r, R):
        r = np.asarray(r, dtype=np.float64)
        B = self.velocity_amplitude
        if self.velocity == "sine":
            return B * np.sin(np.pi * r / R)
        if self.velocity == "poly_bump":
            s = self._support(self.velocity_support, R)
            x = r / s
            return np.where(x < 1, B * x * (1 - x**2) ** 2, 0.0)
        return np.interp(r, self.table_r, self.table_v, right=0.0)


def make_initial_state(profile: InitialProfile, grid: RadialGrid) -> FluidState:
    """Sample ``profile`` at the cell centres of ``grid`` at t = 0."""
    R = grid.R
    edge = np.array([R])
    v_edge = float(profile.velocity_at(edge, R)[0])
    v_scale = max(1.0, abs(profile.velocity_amplitude))
    if abs(v_edge) > SUPPORT_TOL * v_scale:
        raise SupportViolationError(f"initial velocity at R is {v_edge!r}, must vanish")
    if profile.density != "uniform":
        rho_edge = float(profile.density_at(edge, R)[0])
        if rho_edge != 0.0 and abs(rho_edge) > SUPPORT_TOL * max(1.0, profile.density_amplitude):
            raise SupportViolationError(f"initial density at R is {rho_edge!r}, must vanish")
    r = grid.centers
    rho = profile.density_at(r, R)
    if np.any(rho < 0):
        raise NegativeDensityError("initial profile has negative density")
    return FluidState(t=0.0, rho=rho, v=profile.velocity_at(r, R), grid=grid)


@dataclass(frozen=True)
class HypothesisReport:
    H0: float
    n: float
    applicable: bool
    reasons: tuple[str, ...]


def validate_hypotheses(params: ModelParams, state0: FluidState, n: float | None = None):
    """Check the blowup theorem hypotheses for ``state0``.

    Never raises for a failed hypothesis; every failed condition is listed in
    ``reasons``.
    """
    n = params.n if n is None else n
    grid = state0.grid
    r = grid.centers
    H0 = float(np.sum(r**n * state0.v) * grid.dr)
    reasons = []
    if params.delta < 0:
        reasons.append("theorem requires delta >= 0")
    if params.K > 0 and params.gamma <= 1:
        reasons.append("theorem requires K = 0 or gamma > 1")
    if not H0 > 0:
        reasons.append(f"initial weighted moment H0 = {H0!r} is not positive")
    if params.K > 0 and state0.rho[-1] > 0:
        reasons.append("density does not vanish at R while pressure is present")
    if abs(grid.R - params.R) > 1e-12 * params.R:
        reasons.append(f"grid radius {grid.R} differs from R = {params.R}")
    return HypothesisReport(H0=H0, n=float(n), applicable=not reasons, reasons=tuple(reasons))
