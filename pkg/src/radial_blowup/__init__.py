"""Finite-time blowup simulator and proof audit for radial Euler / Euler-Poisson flow."""

from radial_blowup.characteristics import CharacteristicFan, crossing_time_free, evolve_fan
from radial_blowup.config import RunConfig, parse_config
from radial_blowup.diagnostics import (
    BlowupReport,
    blowup_bound,
    boundary_term_audit,
    build_report,
    cauchy_schwarz_audit,
    detect_blowup,
    moment_inequality_audit,
    riccati_floor,
    weighted_moment,
)
from radial_blowup.field import enclosed_integral, radial_field
from radial_blowup.model import (
    FluidState,
    InitialProfile,
    ModelParams,
    RadialGrid,
    alpha,
    make_initial_state,
    pressure,
    validate_hypotheses,
)
from radial_blowup.solver import SchemeConfig, Trajectory, cfl_dt, run, sound_speed, step

__version__ = "0.1.0"

__all__ = [
    "BlowupReport", "CharacteristicFan", "FluidState", "InitialProfile", "ModelParams",
    "RadialGrid", "RunConfig", "SchemeConfig", "Trajectory", "alpha", "blowup_bound",
    "boundary_term_audit", "build_report", "cauchy_schwarz_audit", "cfl_dt",
    "crossing_time_free", "detect_blowup", "enclosed_integral", "evolve_fan",
    "make_initial_state", "moment_inequality_audit", "parse_config", "pressure",
    "radial_field", "riccati_floor", "run", "sound_speed", "step", "validate_hypotheses",
    "weighted_moment",
]
