"""Trajectory model: stations along a lane axis, resampling, curvature and
grade estimation, and placement of observer/target poses at curvilinear
distances.

Distances between observer and target are measured along the lane axis
(curvilinear), matching a vehicle-following reference protocol rather than a
3D chord.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IngestionError, OutOfRangeError, ParameterError

MAX_ABS_GRADE = 0.5


@dataclass(frozen=True)
class TrajectoryStation:
    """One georeferenced pose sample along the trajectory."""

    s: float
    position: np.ndarray  # (3,)
    heading: np.ndarray   # (3,) unit tangent
    kappa: float | None = None
    grade: float | None = None


@dataclass(frozen=True)
class ObserverSpec:
    """Driver eye convention: height above the lane-axis road surface."""

    eye_height: float = 1.0

    def __post_init__(self):
        if self.eye_height <= 0:
            raise ParameterError(f"eye_height must be > 0, got {self.eye_height}")


@dataclass(frozen=True)
class TargetPose:
    """Placement of a target: base position plus local travel direction."""

    position: np.ndarray  # (3,)
    heading: np.ndarray   # (3,) unit


def _polyline_tangents(xyz: np.ndarray) -> np.ndarray:
    """Unit tangents from central differences (one-sided at the ends)."""
    d = np.empty_like(xyz)
    d[1:-1] = xyz[2:] - xyz[:-2]
    d[0] = xyz[1] - xyz[0]
    d[-1] = xyz[-1] - xyz[-2]
    norms = np.linalg.norm(d, axis=1)
    norms[norms == 0] = 1.0
    return d / norms[:, None]


class Trajectory:
    """Immutable ordered station list with optional curvature/grade attributes.

    Arrays are copied and locked at construction; instances are safe to share
    across sweep workers.
    """

    __slots__ = ("s", "xyz", "heading", "kappa", "grade", "lane_offset",
                 "_hcum")

    def __init__(self, s, xyz, heading=None, kappa=None, grade=None,
                 lane_offset: float = 0.0):
        s = np.array(s, dtype=np.float64, copy=True)
        xyz = np.array(xyz, dtype=np.float64, copy=True)
        if s.ndim != 1 or xyz.shape != (s.size, 3):
            raise IngestionError(
                f"expected s (n,) and positions (n, 3), got {s.shape} and {xyz.shape}")
        if s.size < 2:
            raise IngestionError(f"trajectory needs at least 2 stations, got {s.size}")
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(xyz)):
            raise IngestionError("non-finite station coordinates")
        if np.any(np.diff(s) <= 0):
            raise IngestionError("station abscissae must be strictly increasing")
        if heading is None:
            heading = _polyline_tangents(xyz)
        else:
            heading = np.array(heading, dtype=np.float64, copy=True)
            if heading.shape != xyz.shape:
                raise IngestionError("heading array shape mismatch")
            norms = np.linalg.norm(heading, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise IngestionError("headings must be unit vectors")
            heading = heading / norms[:, None]
        kappa = self._station_column("kappa", kappa, s.shape)
        grade = self._station_column("grade", grade, s.shape)
        if grade is not None and np.any(np.abs(grade) >= MAX_ABS_GRADE):
            raise IngestionError(
                f"|grade| must stay below {MAX_ABS_GRADE}, got "
                f"max {np.max(np.abs(grade)):.3f}")
        hseg = np.linalg.norm(np.diff(xyz[:, :2], axis=0), axis=1)
        hcum = np.concatenate(([0.0], np.cumsum(hseg)))
        for attr, val in (("s", s), ("xyz", xyz), ("heading", heading),
                          ("kappa", kappa), ("grade", grade),
                          ("lane_offset", float(lane_offset)),
                          ("_hcum", hcum)):
            object.__setattr__(self, attr, val)
        for arr in (s, xyz, heading, kappa, grade, hcum):
            if arr is not None:
                arr.setflags(write=False)

    @staticmethod
    def _station_column(name: str, arr, shape) -> np.ndarray | None:
        if arr is None:
            return None
        arr = np.array(arr, dtype=np.float64, copy=True)
        if arr.shape != shape:
            raise IngestionError(f"{name} array shape mismatch")
        return arr

    def __setattr__(self, name, value):
        raise AttributeError("Trajectory is immutable")

    def __len__(self) -> int:
        return self.s.size

    @property
    def s_start(self) -> float:
        return float(self.s[0])

    @property
    def s_end(self) -> float:
        return float(self.s[-1])

    @property
    def has_geometry(self) -> bool:
        return self.kappa is not None and self.grade is not None

    def stations(self) -> list[TrajectoryStation]:
        return [
            TrajectoryStation(
                s=float(self.s[i]), position=self.xyz[i], heading=self.heading[i],
                kappa=None if self.kappa is None else float(self.kappa[i]),
                grade=None if self.grade is None else float(self.grade[i]))
            for i in range(len(self))
        ]

    def in_range(self, s: float, tol: float = 1e-9) -> bool:
        return self.s_start - tol <= s <= self.s_end + tol

    def _check_range(self, s: float):
        if not self.in_range(s):
            raise OutOfRangeError(
                f"s={s:.3f} outside trajectory range "
                f"[{self.s_start:.3f}, {self.s_end:.3f}]")

    def position_at(self, s: float) -> np.ndarray:
        """Point on the recorded path at abscissa s (linear along the polyline)."""
        self._check_range(s)
        return np.array([np.interp(s, self.s, self.xyz[:, i]) for i in range(3)])

    def heading_at(self, s: float) -> np.ndarray:
        self._check_range(s)
        h = np.array([np.interp(s, self.s, self.heading[:, i]) for i in range(3)])
        n = np.linalg.norm(h)
        return h / n if n > 0 else np.array([1.0, 0.0, 0.0])

    def axis_point(self, s: float) -> np.ndarray:
        """Lane-axis point at abscissa s (recorded path shifted by lane_offset)."""
        p = self.position_at(s)
        if self.lane_offset != 0.0:
            p = p + self.lane_offset * left_normal(self.heading_at(s))
        return p

    def attributes_at(self, s: float) -> tuple[float, float]:
        """Interpolated (kappa, grade) at abscissa s."""
        if not self.has_geometry:
            raise ParameterError("trajectory has no curvature/grade attributes; "
                                 "run estimate_geometry first")
        self._check_range(s)
        return (float(np.interp(s, self.s, self.kappa)),
                float(np.interp(s, self.s, self.grade)))

    def horizontal_arc_at(self, s: float) -> float:
        """Cumulative horizontal run from the start to abscissa s."""
        self._check_range(s)
        return float(np.interp(s, self.s, self._hcum))


def left_normal(heading: np.ndarray) -> np.ndarray:
    """Horizontal unit normal pointing left of travel."""
    n = np.array([-heading[1], heading[0], 0.0])
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ParameterError("heading is vertical; no horizontal normal")
    return n / norm


def resample_trajectory(traj: Trajectory, step: float) -> Trajectory:
    """Resample stations on the regular grid s0, s0+step, ... <= s_end.

    Positions are interpolated linearly along the polyline; curvature and
    grade are re-estimated afterwards (window = 2*step). Resampling at the
    same step twice reproduces identical stations.
    """
    if step <= 0:
        raise ParameterError(f"resample step must be > 0, got {step}")
    n = int(np.floor((traj.s_end - traj.s_start) / step + 1e-9)) + 1
    grid = traj.s_start + step * np.arange(n)
    xyz = np.column_stack([np.interp(grid, traj.s, traj.xyz[:, i]) for i in range(3)])
    out = Trajectory(grid, xyz, lane_offset=traj.lane_offset)
    if len(out) >= 3:
        return estimate_geometry(out, window=2.0 * step)
    dz = xyz[-1, 2] - xyz[0, 2]
    run = np.linalg.norm(xyz[-1, :2] - xyz[0, :2])
    g = dz / run if run > 1e-12 else 0.0
    return Trajectory(grid, xyz, kappa=np.zeros(len(out)),
                      grade=np.full(len(out), g), lane_offset=traj.lane_offset)


def _circumscribed_curvature(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Signed curvature of the circle through three horizontal points.

    Positive for a left turn; 0 for (near-)collinear points.
    """
    ab = b - a
    ac = c - a
    bc = c - b
    cross = ab[0] * ac[1] - ab[1] * ac[0]
    la, lb, lc = np.linalg.norm(bc), np.linalg.norm(ac), np.linalg.norm(ab)
    area2 = abs(cross)
    scale = max(la, lb, lc)
    if scale <= 0 or area2 < 1e-12 * scale * scale:
        return 0.0
    radius = (la * lb * lc) / (2.0 * area2)
    return float(np.sign(cross) / radius)


def estimate_geometry(traj: Trajectory, window: float) -> Trajectory:
    """Fill curvature and grade from neighbors at +-window/2 around each station.

    Curvature comes from the circumscribed circle of the horizontally
    projected triplet; grade is vertical rise over horizontal run across the
    same window. The two end stations copy the nearest interior estimate.
    """
    n = len(traj)
    if n < 3:
        raise IngestionError("geometry estimation needs at least 3 stations")
    spacing = float(np.min(np.diff(traj.s)))
    if window < 2.0 * spacing - 1e-9:
        raise ParameterError(
            f"window {window:.3f} must cover at least twice the station "
            f"spacing {spacing:.3f}")
    half = window / 2.0
    kappa = np.zeros(n)
    grade = np.zeros(n)
    for j in range(1, n - 1):
        sm = max(traj.s_start, traj.s[j] - half)
        sp = min(traj.s_end, traj.s[j] + half)
        a = traj.position_at(sm)
        b = traj.xyz[j]
        c = traj.position_at(sp)
        kappa[j] = _circumscribed_curvature(a[:2], b[:2], c[:2])
        run = traj.horizontal_arc_at(sp) - traj.horizontal_arc_at(sm)
        grade[j] = (c[2] - a[2]) / run if run > 1e-9 else 0.0
    kappa[0], grade[0] = kappa[1], grade[1]
    kappa[-1], grade[-1] = kappa[-2], grade[-2]
    return Trajectory(traj.s, traj.xyz, heading=traj.heading, kappa=kappa,
                      grade=grade, lane_offset=traj.lane_offset)


def place_target(traj: Trajectory, s0: float, d: float, height: float) -> TargetPose:
    """Pose at curvilinear distance d ahead of station s0, raised by height.

    Raises OutOfRangeError when s0 or s0+d leaves the trajectory; sweep
    callers treat that as reaching the end of the measurable range.
    """
    traj._check_range(s0)
    st = s0 + d
    traj._check_range(st)
    base = traj.axis_point(st)
    return TargetPose(position=base + np.array([0.0, 0.0, height]),
                      heading=traj.heading_at(st))


def observer_eye(traj: Trajectory, s: float, observer: ObserverSpec) -> np.ndarray:
    """Eye point: lane-axis surface point at s raised by the eye height."""
    return traj.axis_point(s) + np.array([0.0, 0.0, observer.eye_height])
