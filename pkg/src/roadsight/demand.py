"""Required visibility distance: design-speed modulation plus stopping distance.

The per-station demand is the conventional stop-on-obstacle distance: a
reaction leg at the local design speed plus a braking leg against wet-road
friction corrected by grade. The design speed itself is a road-class base
value modulated by horizontal curvature and (optionally) grade through
configurable monotone tables; the shipped tables are documented defaults,
not normative values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBrakingError, ParameterError
from .trajectory import Trajectory

# Braking is treated as infeasible when friction + grade falls at or below
# this floor (steep downhill on a slick surface).
BRAKING_FEASIBILITY_FLOOR = 0.05

# Default curvature -> speed-multiplier law. Configuration, not ground truth:
# agencies substitute their own design tables.
DEFAULT_SPEED_LAW: tuple[tuple[float, float], ...] = (
    (0.0, 1.0),
    (0.002, 0.92),
    (0.005, 0.80),
    (0.01, 0.62),
    (0.02, 0.45),
)


def _interp_table(table: np.ndarray, x: float) -> float:
    """Piecewise-linear lookup clamped to the table's end values."""
    return float(np.interp(x, table[:, 0], table[:, 1]))


@dataclass(frozen=True)
class DemandParams:
    """Parameters of the required-distance model (SI units)."""

    base_v85: float                # conventional design speed, m/s
    reaction_time: float = 2.0     # s
    friction: float = 0.4          # wet-road longitudinal grip
    gravity: float = 9.81          # m/s^2
    speed_law: tuple[tuple[float, float], ...] = DEFAULT_SPEED_LAW
    grade_speed_law: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.base_v85 <= 0:
            raise ParameterError(f"base_v85 must be > 0, got {self.base_v85}")
        if self.reaction_time < 0:
            raise ParameterError("reaction_time must be >= 0")
        if not (0 < self.friction <= 1):
            raise ParameterError(f"friction must be in (0, 1], got {self.friction}")
        law = np.asarray(self.speed_law, dtype=float)
        if law.ndim != 2 or law.shape[1] != 2 or law.shape[0] < 1:
            raise ParameterError("speed_law must be a [[kappa, multiplier], ...] table")
        if np.any(np.diff(law[:, 0]) <= 0):
            raise ParameterError("speed_law kappa knots must be strictly ascending")
        if np.any(np.diff(law[:, 1]) > 0):
            raise ParameterError("speed_law multipliers must be non-increasing")
        if np.any(law[:, 1] <= 0) or np.any(law[:, 1] > 1):
            raise ParameterError("speed_law multipliers must lie in (0, 1]")
        if abs(_interp_table(law, 0.0) - 1.0) > 1e-12:
            raise ParameterError("speed_law multiplier at kappa=0 must be 1")
        if self.grade_speed_law:
            glaw = np.asarray(self.grade_speed_law, dtype=float)
            if glaw.ndim != 2 or glaw.shape[1] != 2:
                raise ParameterError("grade_speed_law must be a [[grade, multiplier], ...] table")
            if np.any(np.diff(glaw[:, 0]) <= 0):
                raise ParameterError("grade_speed_law knots must be strictly ascending")
            if np.any(glaw[:, 1] <= 0) or np.any(glaw[:, 1] > 1):
                raise ParameterError("grade_speed_law multipliers must lie in (0, 1]")

    @property
    def _speed_table(self) -> np.ndarray:
        return np.asarray(self.speed_law, dtype=float)

    @property
    def _grade_table(self) -> np.ndarray | None:
        if not self.grade_speed_law:
            return None
        return np.asarray(self.grade_speed_law, dtype=float)


def v85_speed(kappa: float, grade: float, p: DemandParams) -> float:
    """Local design speed: base value scaled by the curvature and grade laws."""
    mult = _interp_table(p._speed_table, abs(kappa))
    gtab = p._grade_table
    if gtab is not None:
        mult *= _interp_table(gtab, grade)
    return float(np.clip(p.base_v85 * mult, np.nextafter(0.0, 1.0), p.base_v85))


def stopping_distance(v: float, grade: float, p: DemandParams) -> float:
    """Reaction leg plus braking leg: v*t_r + v^2 / (2 g (f + grade)).

    A downhill (negative) grade lengthens the braking leg. Raises
    InfeasibleBrakingError when friction + grade falls at or below the
    feasibility floor.
    """
    if v < 0:
        raise ParameterError(f"speed must be >= 0, got {v}")
    denom = p.friction + grade
    if denom <= BRAKING_FEASIBILITY_FLOOR:
        raise InfeasibleBrakingError(
            f"friction + grade = {denom:.3f} <= {BRAKING_FEASIBILITY_FLOOR}; "
            "vehicle cannot stop on this slope")
    return v * p.reaction_time + v * v / (2.0 * p.gravity * denom)


def required_distance(kappa: float, grade: float, p: DemandParams) -> float:
    """Required visibility distance at one station."""
    return stopping_distance(v85_speed(kappa, grade, p), grade, p)


def required_profile(traj: Trajectory, p: DemandParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-station required distances.

    Returns (required, infeasible): required is NaN where braking is
    infeasible, with the matching flag set; those stations are reported
    separately downstream.
    """
    if not traj.has_geometry:
        raise ParameterError("trajectory lacks curvature/grade attributes; "
                             "run estimate_geometry first")
    n = len(traj)
    required = np.full(n, np.nan)
    infeasible = np.zeros(n, dtype=bool)
    for i in range(n):
        try:
            required[i] = required_distance(traj.kappa[i], traj.grade[i], p)
        except InfeasibleBrakingError:
            infeasible[i] = True
    return required, infeasible
