"""
Weighted moment, blowup-time bound, Riccati comparison floor and numerical
audits of the integration-method inequalities along a trajectory.

All radial integrals use the midpoint rule on cell centres with weight dr,
except the Cauchy-Schwarz audit, which integrates against the exact cell
measure of d(r**(n+1)) so the discrete inequality holds as an identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from radial_blowup.characteristics import CharacteristicFan
from radial_blowup.errors import (
    ConsistencyError,
    DomainError,
    HypothesisViolatedError,
    InvalidExponentError,
)
from radial_blowup.model import FluidState, HypothesisReport, ModelParams, validate_hypotheses
from radial_blowup.solver import Trajectory, max_velocity_gradient

BOUND_TOLERANCE = 0.05
FLOOR_TOLERANCE = 0.02
CS_TOLERANCE = 1e-12
BOUNDARY_TOLERANCE = 1e-10
AUDIT_TOLERANCE = 1e-3


def _check_n(n):
    if not n > 0:
        raise InvalidExponentError(f"weight exponent must be > 0, got {n}")


def weighted_moment(state: FluidState, n: float, R: float | None = None) -> float:
    """Midpoint approximation of ``H = int_0^R r**n V dr``."""
    _check_n(n)
    grid = state.grid
    R = grid.R if R is None else R
    r = grid.centers
    inside = r <= R
    return float(np.sum(r[inside] ** n * state.v[inside]) * grid.dr)


def blowup_bound(R: float, n: float, H0: float) -> float:
    """Blowup time bound ``2 R**(n+2) / (n (n+1) H0)``."""
    _check_n(n)
    if not R > 0:
        raise DomainError(f"R must be > 0, got {R}")
    if not H0 > 0:
        raise HypothesisViolatedError(f"H0 must be > 0, got {H0}")
    return 2.0 * R ** (n + 2) / (n * (n + 1) * H0)


def riccati_floor(t: float, R: float, n: float, H0: float) -> float:
    """Lower solution ``2 R**(n+2) H0 / (2 R**(n+2) - n (n+1) H0 t)``."""
    T = blowup_bound(R, n, H0)
    if t < 0 or t >= T:
        raise DomainError(f"floor is defined on [0, {T}), got t = {t}")
    c = 2.0 * R ** (n + 2)
    return c * H0 / (c - n * (n + 1) * H0 * t)


def _floor_or_none(t, R, n, H0):
    try:
        return riccati_floor(t, R, n, H0)
    except (DomainError, HypothesisViolatedError):
        return None


@dataclass(frozen=True)
class CauchySchwarzAudit:
    slack: float
    scale: float
    measure: float
    measure_bound: float

    @property
    def passed(self) -> bool:
        measure_ok = self.measure <= self.measure_bound * (1 + 1e-12)
        return measure_ok and self.slack >= -CS_TOLERANCE * self.scale


def cauchy_schwarz_audit(state: FluidState, n: float, R: float | None = None):
    """Slack ``R**(n+1) int V**2 d(r**(n+1)) - (int V d(r**(n+1)))**2``.

    ``scale`` is the larger of the two sides, for relative tolerances.
    """
    _check_n(n)
    grid = state.grid
    R = grid.R if R is None else R
    faces = grid.faces
    w = faces[1:] ** (n + 1) - faces[:-1] ** (n + 1)
    v = state.v
    lhs = R ** (n + 1) * float(np.sum(w * v * v))
    rhs = float(np.sum(w * v)) ** 2
    return CauchySchwarzAudit(
        slack=lhs - rhs,
        scale=max(lhs, rhs),
        measure=float(np.sum(w)),
        measure_bound=R ** (n + 1),
    )


@dataclass(frozen=True)
class BoundaryAudit:
    velocity_term: float
    density_term: float
    tolerance: float = BOUNDARY_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.velocity_term <= self.tolerance and self.density_term <= self.tolerance

    def __iter__(self):
        yield self.velocity_term
        yield self.density_term


def boundary_term_audit(state: FluidState, n: float, gamma: float, R: float | None = None,
                        tolerance: float = BOUNDARY_TOLERANCE) -> BoundaryAudit:
    """Integration-by-parts boundary terms ``R**n V(R)**2`` and ``R**n rho(R)**(gamma-1)``.

    The trace at R is the outermost cell value.
    """
    _check_n(n)
    R = state.grid.R if R is None else R
    v_r = float(state.v[-1])
    rho_r = float(state.rho[-1])
    dens = R**n * rho_r ** (gamma - 1) if rho_r > 0 else 0.0
    return BoundaryAudit(velocity_term=R**n * v_r**2, density_term=dens, tolerance=tolerance)


@dataclass(frozen=True, eq=False)
class MomentAudit:
    times: np.ndarray
    residuals: np.ndarray
    tolerances: np.ndarray
    skipped: bool = False
    reason: str = ""

    @property
    def passed(self) -> bool | None:
        if self.skipped:
            return None
        return bool(np.all(self.residuals >= -self.tolerances))


def _hypotheses(params, trajectory, n):
    return validate_hypotheses(params, trajectory.snapshots[0], n=n)


def moment_inequality_audit(trajectory: Trajectory, n: float, R: float, params: ModelParams,
                            audit_tolerance: float = AUDIT_TOLERANCE) -> MomentAudit:
    """Residual ``dH/dt - n (n+1) H**2 / (2 R**(n+2))`` at interior snapshots.

    dH/dt is a centred difference on snapshot times, independent of the
    solver internals.  Residuals are always computed; the audit is marked
    skipped (never failed) when the hypotheses are unmet.
    """
    _check_n(n)
    if len(trajectory.snapshots) < 3:
        empty = np.zeros(0)
        return MomentAudit(empty, empty, empty, skipped=True, reason="fewer than 3 snapshots")
    t = trajectory.times
    H = np.array([weighted_moment(s, n, R) for s in trajectory.snapshots])
    dH = (H[2:] - H[:-2]) / (t[2:] - t[:-2])
    Hi = H[1:-1]
    residuals = dH - n * (n + 1) * Hi**2 / (2.0 * R ** (n + 2))
    tol = audit_tolerance * np.maximum(1.0, Hi**2)
    hyp = _hypotheses(params, trajectory, n)
    return MomentAudit(times=t[1:-1], residuals=residuals, tolerances=tol,
                       skipped=not hyp.applicable, reason="; ".join(hyp.reasons))


@dataclass(frozen=True)
class BlowupDetection:
    time: float
    mechanism: str


def detect_blowup(trajectory: Trajectory, gradient_threshold: float | None = None):
    """Earliest snapshot at which a blowup proxy fires, or ``None``.

    Proxies: velocity gradient above threshold, non-finite values, and the
    solver's dt-underflow or overflow termination (dated at the last snapshot).
    """
    threshold = trajectory.gradient_threshold if gradient_threshold is None else gradient_threshold
    for snap in trajectory.snapshots:
        if not (np.all(np.isfinite(snap.v)) and np.all(np.isfinite(snap.rho))):
            return BlowupDetection(snap.t, "non_finite")
        if max_velocity_gradient(snap) > threshold:
            return BlowupDetection(snap.t, "gradient")
    if trajectory.termination == "dt_underflow":
        return BlowupDetection(trajectory.final.t, "dt_underflow")
    if trajectory.termination == "overflow":
        return BlowupDetection(trajectory.final.t, "non_finite")
    return None


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    H: dict
    mass: float
    max_abs_V: float
    max_grad_V: float
    max_rho: float
    riccati_floor: dict
    cs_slack: dict


def diagnostics_records(trajectory: Trajectory, params: ModelParams, n_list) -> list:
    """One record per snapshot; floors are ``None`` where undefined."""
    R = params.R
    H0 = {n: weighted_moment(trajectory.snapshots[0], n, R) for n in n_list}
    records = []
    for snap in trajectory.snapshots:
        records.append(DiagnosticsRecord(
            t=snap.t,
            H={n: weighted_moment(snap, n, R) for n in n_list},
            mass=snap.geometric_mass(params.N),
            max_abs_V=float(np.max(np.abs(snap.v))),
            max_grad_V=max_velocity_gradient(snap),
            max_rho=float(np.max(snap.rho)),
            riccati_floor={
                n: _floor_or_none(snap.t, R, n, H0[n]) if params.theorem_applicable else None
                for n in n_list
            },
            cs_slack={n: cauchy_schwarz_audit(snap, n, R).slack for n in n_list},
        ))
    return records


@dataclass(frozen=True, eq=False)
class BlowupReport:
    """Outcome of one run.  Verdicts are ``None`` when not applicable.

    Detection is proxy-based: the bound certifies loss of classical
    solvability, which the solver can only observe through its proxies.
    """

    hypotheses: dict
    H0: dict
    bound_T: dict
    detected: BlowupDetection | None
    oracle_time: float | None
    verdicts: dict
    audits: dict
    termination: str
    floor_mass_injected: float
    support_reached_boundary: float | None
    floor_margin: dict = field(default_factory=dict)
    proxy_based: bool = True

    @property
    def applicable(self) -> bool:
        return any(h.applicable for h in self.hypotheses.values())

    @property
    def passed(self) -> bool:
        values = list(self.verdicts.values()) + list(self.audits.values())
        return all(v is not False for v in values)


def floor_violation(trajectory: Trajectory, n: float, params: ModelParams, H0: float,
                    until: float | None = None) -> float:
    """Largest relative shortfall ``max(0, 1 - H/floor)`` over snapshots before ``until``."""
    T = blowup_bound(params.R, n, H0)
    limit = T if until is None else min(T, until)
    worst = 0.0
    for snap in trajectory.snapshots:
        if snap.t >= limit:
            break
        floor = riccati_floor(snap.t, params.R, n, H0)
        worst = max(worst, 1.0 - weighted_moment(snap, n, params.R) / floor)
    return worst


def _all_or_none(values):
    values = [v for v in values if v is not None]
    return all(values) if values else None


def build_report(trajectory: Trajectory, params: ModelParams, n_list,
                 fan: CharacteristicFan | None = None) -> BlowupReport:
    """Assemble hypotheses, bounds, detection and audit verdicts."""
    grid = trajectory.snapshots[0].grid
    if trajectory.params is not None and trajectory.params != params:
        raise ConsistencyError("trajectory was produced with different model parameters")
    if abs(grid.R - params.R) > 1e-12 * params.R:
        raise ConsistencyError(f"grid radius {grid.R} differs from R = {params.R}")
    if fan is not None and fan.r0.shape != (grid.cells,):
        raise ConsistencyError("characteristic fan does not match the solver grid")
    if not n_list:
        raise ConsistencyError("n_list must not be empty")

    R = params.R
    state0 = trajectory.snapshots[0]
    hyps: dict[float, HypothesisReport] = {n: validate_hypotheses(params, state0, n=n) for n in n_list}
    H0 = {n: h.H0 for n, h in hyps.items()}
    bound = {n: blowup_bound(R, n, h.H0) if h.applicable else None for n, h in hyps.items()}
    detected = detect_blowup(trajectory)
    applicable = [n for n in n_list if hyps[n].applicable]

    le_bound = {}
    floor_ok = {}
    margins = {}
    moment_ok = {}
    for n in applicable:
        T = bound[n]
        if detected is not None:
            le_bound[n] = detected.time <= T * (1 + BOUND_TOLERANCE)
        elif trajectory.final.t >= T * (1 + BOUND_TOLERANCE):
            le_bound[n] = False
        else:
            le_bound[n] = None
        until = detected.time if detected is not None else None
        margins[n] = floor_violation(trajectory, n, params, H0[n], until=until)
        floor_ok[n] = margins[n] <= FLOOR_TOLERANCE
        moment_ok[n] = moment_inequality_audit(trajectory, n, R, params).passed

    cs_ok = boundary_ok = None
    if applicable:
        cs_ok = all(
            cauchy_schwarz_audit(s, n, R).passed for s in trajectory.snapshots for n in applicable
        )
        t_hit = trajectory.support_reached_boundary
        before = [s for s in trajectory.snapshots if t_hit is None or s.t < t_hit]
        if before:
            boundary_ok = all(
                boundary_term_audit(s, n, params.gamma, R).passed for s in before for n in applicable
            )

    return BlowupReport(
        hypotheses=hyps,
        H0=H0,
        bound_T=bound,
        detected=detected,
        oracle_time=None if fan is None else fan.blowup_time,
        verdicts={
            "detected_le_bound": _all_or_none(le_bound.values()),
            "H_ge_floor": _all_or_none(floor_ok.values()),
        },
        audits={
            "cauchy_schwarz": cs_ok,
            "boundary_terms": boundary_ok,
            "moment_inequality": _all_or_none(moment_ok.values()),
        },
        termination=trajectory.termination,
        floor_mass_injected=trajectory.floor_mass_injected,
        support_reached_boundary=trajectory.support_reached_boundary,
        floor_margin=margins,
    )


def binding_bound(report: BlowupReport) -> float:
    """Smallest bound over the applicable weight exponents (``inf`` if none)."""
    values = [T for T in report.bound_T.values() if T is not None]
    return min(values) if values else math.inf
