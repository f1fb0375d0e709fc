"""Radial force field from the density by cumulative quadrature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radial_blowup.errors import NegativeDensityError
from radial_blowup.model import ModelParams, RadialGrid, alpha


@dataclass(frozen=True, eq=False)
class RadialField:
    phi_r: np.ndarray
    enclosed: np.ndarray


def _check_density(rho):
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho < 0):
        i = int(np.argmax(rho < 0))
        raise NegativeDensityError(f"negative density {rho[i]!r} in cell {i}")
    return rho


def enclosed_integral(grid: RadialGrid, rho, N: int) -> np.ndarray:
    """Partial sums ``m_i = sum_{j<=i} rho_j r_j**(N-1) dr``.

    ``m_i`` approximates the integral of ``rho s**(N-1)`` up to the outer face
    of cell ``i``; the last entry is the geometric mass conserved by the solver.
    """
    rho = _check_density(rho)
    return np.cumsum(rho * grid.geometric_volumes(N))


def radial_field(grid: RadialGrid, rho, params: ModelParams) -> RadialField:
    """Force ``Phi_r = alpha(N) delta m(r) / r**(N-1)`` at the cell centres.

    The enclosed integral is taken up to the cell centre, i.e. the outer-face
    partial sum minus half of the cell's own contribution; evaluating the
    outer-face sum at the centre would be off by half a cell.
    """
    rho = _check_density(rho)
    N = params.N
    weights = grid.geometric_volumes(N)
    m = np.cumsum(rho * weights)
    if params.delta == 0:
        return RadialField(phi_r=np.zeros(grid.cells), enclosed=m)
    m_center = m - 0.5 * rho * weights
    phi_r = alpha(N) * params.delta * m_center / grid.centers ** (N - 1)
    return RadialField(phi_r=phi_r, enclosed=m)
