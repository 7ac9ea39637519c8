"""Sight-distance engine: target conventions, per-station visibility queries,
maximum-distance search and trajectory sweeps.

Two target conventions are supported: a pair of points standing in for a
vehicle's rear lamps (visible while at least one point has a clear line of
sight) and a vehicle-sized box judged visible while at least a threshold
fraction of its eye-facing surface is unoccluded.

The maximum-distance search uses first-invisible semantics: the target moves
away step by step and the search stops at the first occluded step, ignoring
any re-emergence farther out.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bvh import OcclusionIndex
from .errors import OutOfRangeError, ParameterError
from .trajectory import (ObserverSpec, TargetPose, Trajectory, left_normal,
                         observer_eye, place_target)

FIXED_DISTANCE_SET = (50.0, 65.0, 85.0, 105.0, 130.0, 160.0, 200.0, 250.0, 280.0)
DEFAULT_CAP = 400.0


@dataclass(frozen=True)
class PointPairTarget:
    """Two points at rear-lamp height, straddling the lane axis."""

    lamp_height: float = 0.6
    lamp_separation: float = 1.2

    kind = "point_pair"

    def __post_init__(self):
        if self.lamp_height <= 0:
            raise ParameterError("lamp_height must be > 0")
        if self.lamp_separation < 0:
            raise ParameterError("lamp_separation must be >= 0")


@dataclass(frozen=True)
class BoxTarget:
    """Vehicle-sized parallelepiped, base on the road, centered on the axis."""

    width: float = 1.5
    length: float = 4.0
    height: float = 1.3
    visible_fraction_threshold: float = 0.05

    kind = "box"

    def __post_init__(self):
        if min(self.width, self.length, self.height) <= 0:
            raise ParameterError("box dimensions must be > 0")
        if not (0 < self.visible_fraction_threshold < 1):
            raise ParameterError("visible_fraction_threshold must be in (0, 1)")


TargetSpec = PointPairTarget | BoxTarget


@dataclass(frozen=True)
class SweepConfig:
    station_step: float = 5.0
    search_step: float = 5.0
    cap: float = DEFAULT_CAP
    mode: str = "max"  # "max" | "fixed"
    distances: tuple[float, ...] = FIXED_DISTANCE_SET
    target: TargetSpec = field(default_factory=PointPairTarget)
    observer: ObserverSpec = field(default_factory=ObserverSpec)
    box_density: float = 64.0  # samples per square meter of target surface

    def __post_init__(self):
        if self.station_step <= 0 or self.search_step <= 0:
            raise ParameterError("sweep steps must be > 0")
        if self.cap <= self.search_step:
            raise ParameterError("cap must exceed the search step")
        if self.mode not in ("max", "fixed"):
            raise ParameterError(f"unknown sweep mode {self.mode!r}")
        if self.mode == "fixed" and not self.distances:
            raise ParameterError("fixed mode needs a distance list")
        if self.box_density < 1:
            raise ParameterError("box sampling density must be >= 1 sample/m^2")


@dataclass(frozen=True)
class SightContext:
    """Everything a per-station visibility query needs; immutable."""

    index: OcclusionIndex
    traj: Trajectory
    observer: ObserverSpec = field(default_factory=ObserverSpec)
    target: TargetSpec = field(default_factory=PointPairTarget)
    box_density: float = 64.0


@dataclass(frozen=True)
class TargetQuery:
    visible: bool
    fraction: float
    in_range: bool


class VisibilityProfile:
    """Per-station available vs required distances plus fixed-distance flags."""

    __slots__ = ("s", "available", "required", "infeasible",
                 "fixed_distances", "fixed_visible", "cap")

    def __init__(self, s, available=None, required=None, infeasible=None,
                 fixed_distances=(), fixed_visible=None, cap=DEFAULT_CAP):
        self.s = np.asarray(s, dtype=np.float64)
        n = self.s.size
        self.available = (np.full(n, np.nan) if available is None
                          else np.asarray(available, dtype=np.float64))
        self.required = (np.full(n, np.nan) if required is None
                         else np.asarray(required, dtype=np.float64))
        self.infeasible = (np.zeros(n, dtype=bool) if infeasible is None
                           else np.asarray(infeasible, dtype=bool))
        self.fixed_distances = tuple(float(d) for d in fixed_distances)
        if fixed_visible is None:
            fixed_visible = np.zeros((n, len(self.fixed_distances)), dtype=bool)
        self.fixed_visible = np.asarray(fixed_visible, dtype=bool)
        if self.fixed_visible.shape != (n, len(self.fixed_distances)):
            raise ParameterError("fixed_visible shape mismatch")
        self.cap = float(cap)
        for name in ("available", "required"):
            if getattr(self, name).shape != (n,):
                raise ParameterError(f"{name} shape mismatch")

    def __len__(self) -> int:
        return self.s.size

    @property
    def has_available(self) -> bool:
        return bool(np.any(np.isfinite(self.available)))

    @property
    def has_required(self) -> bool:
        return bool(np.any(np.isfinite(self.required)))

    def deficit(self) -> np.ndarray:
        """Strict shortfall flags; infeasible stations never count."""
        with np.errstate(invalid="ignore"):
            return ((self.available < self.required)
                    & np.isfinite(self.available) & np.isfinite(self.required)
                    & ~self.infeasible)

    def with_demand(self, required: np.ndarray,
                    infeasible: np.ndarray) -> "VisibilityProfile":
        return VisibilityProfile(self.s, self.available, required, infeasible,
                                 self.fixed_distances, self.fixed_visible,
                                 self.cap)


def _horizontal_forward(heading: np.ndarray) -> np.ndarray:
    f = np.array([heading[0], heading[1], 0.0])
    n = np.linalg.norm(f)
    if n < 1e-12:
        raise ParameterError("heading has no horizontal component")
    return f / n


def lamp_points(pose: TargetPose, target: PointPairTarget) -> np.ndarray:
    """World positions of the two lamps for a target base pose."""
    side = left_normal(pose.heading)
    up = np.array([0.0, 0.0, target.lamp_height])
    half = 0.5 * target.lamp_separation
    return np.stack([pose.position + up + half * side,
                     pose.position + up - half * side])


def point_pair_visible(index: OcclusionIndex, eye: np.ndarray,
                       lamps: np.ndarray) -> bool:
    """True while at least one lamp point has a clear line of sight."""
    lamps = np.atleast_2d(lamps)
    eyes = np.broadcast_to(eye, lamps.shape)
    hits = index.segments_hit(eyes, lamps)
    return not bool(np.all(hits))


def _face_grid(n_u: int, n_v: int, u_len: float, v_len: float):
    u = ((np.arange(n_u) + 0.5) / n_u - 0.5) * u_len
    v = ((np.arange(n_v) + 0.5) / n_v - 0.5) * v_len
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return uu.ravel(), vv.ravel()


def _sample_count(length: float, density: float) -> int:
    # even counts keep mid-plane occlusion cuts between sample rows
    return max(2, 2 * int(round(length * np.sqrt(density) / 2.0)))


def box_sample_points(pose: TargetPose, box: BoxTarget, eye: np.ndarray,
                      density: float) -> np.ndarray:
    """Regular-grid samples on the box faces oriented toward the eye."""
    f = _horizontal_forward(pose.heading)
    l = left_normal(pose.heading)
    up = np.array([0.0, 0.0, 1.0])
    base = pose.position
    hw, hl, h = box.width / 2.0, box.length / 2.0, box.height
    faces = (
        (base + hl * f + 0.5 * h * up, f, l, box.width, up, box.height),
        (base - hl * f + 0.5 * h * up, -f, l, box.width, up, box.height),
        (base + hw * l + 0.5 * h * up, l, f, box.length, up, box.height),
        (base - hw * l + 0.5 * h * up, -l, f, box.length, up, box.height),
        (base + h * up, up, f, box.length, l, box.width),
        (base, -up, f, box.length, l, box.width),
    )
    samples = []
    for center, normal, u_axis, u_len, v_axis, v_len in faces:
        if float((eye - center) @ normal) <= 1e-9:
            continue
        uu, vv = _face_grid(_sample_count(u_len, density),
                            _sample_count(v_len, density), u_len, v_len)
        samples.append(center + uu[:, None] * u_axis + vv[:, None] * v_axis)
    if not samples:
        return np.zeros((0, 3))
    return np.vstack(samples)


def _eye_inside_box(pose: TargetPose, box: BoxTarget, eye: np.ndarray) -> bool:
    f = _horizontal_forward(pose.heading)
    l = left_normal(pose.heading)
    rel = eye - pose.position
    return (abs(float(rel @ f)) <= box.length / 2.0
            and abs(float(rel @ l)) <= box.width / 2.0
            and 0.0 <= rel[2] <= box.height)


def box_visible_fraction(index: OcclusionIndex, eye: np.ndarray,
                         pose: TargetPose, box: BoxTarget,
                         density: float = 64.0) -> float:
    """Fraction of eye-facing box surface with a clear line of sight.

    The scene mesh is the only occluder; the target itself never blocks its
    own samples. An eye inside the box sees everything by definition.
    """
    if density < 1:
        raise ParameterError("density must be >= 1 sample/m^2")
    eye = np.asarray(eye, dtype=np.float64)
    if _eye_inside_box(pose, box, eye):
        return 1.0
    samples = box_sample_points(pose, box, eye, density)
    if len(samples) == 0:
        return 0.0
    eyes = np.broadcast_to(eye, samples.shape)
    hits = index.segments_hit(eyes, samples)
    return float(np.count_nonzero(~hits)) / float(len(samples))


def target_query(ctx: SightContext, s: float, d: float) -> TargetQuery:
    """Visibility of the configured target at curvilinear distance d from s."""
    try:
        pose = place_target(ctx.traj, s, d, height=0.0)
    except OutOfRangeError:
        return TargetQuery(visible=False, fraction=0.0, in_range=False)
    eye = observer_eye(ctx.traj, s, ctx.observer)
    if isinstance(ctx.target, PointPairTarget):
        lamps = lamp_points(pose, ctx.target)
        hits = ctx.index.segments_hit(np.broadcast_to(eye, lamps.shape), lamps)
        clear = int(np.count_nonzero(~hits))
        return TargetQuery(visible=clear > 0, fraction=clear / len(lamps),
                           in_range=True)
    fraction = box_visible_fraction(ctx.index, eye, pose, ctx.target,
                                    ctx.box_density)
    return TargetQuery(visible=fraction >= ctx.target.visible_fraction_threshold,
                       fraction=fraction, in_range=True)


def target_visible_at(ctx: SightContext, s: float, d: float) -> bool:
    return target_query(ctx, s, d).visible


def max_visibility_distance(ctx: SightContext, s: float, search_step: float,
                            cap: float = DEFAULT_CAP) -> float:
    """Largest surveyed distance at which the target stays visible.

    Scans d = step, 2*step, ... and stops at the first invisible (or
    out-of-range) step, returning the previous one; returns cap when the
    target stays visible through the whole grid, and 0 when already invisible
    at the first step.
    """
    if search_step <= 0:
        raise ParameterError("search_step must be > 0")
    last_visible = 0.0
    i = 1
    while True:
        d = search_step * i
        if d > cap + 1e-9:
            return cap
        q = target_query(ctx, s, d)
        if not (q.in_range and q.visible):
            return last_visible
        last_visible = d
        i += 1


def sweep(ctx: SightContext, stations: np.ndarray,
          config: SweepConfig) -> VisibilityProfile:
    """Apply the configured visibility mode at every requested station."""
    stations = np.asarray(stations, dtype=np.float64)
    n = stations.size
    available = np.full(n, np.nan)
    distances = config.distances if config.mode == "fixed" else ()
    fixed = np.zeros((n, len(distances)), dtype=bool)
    for i, s in enumerate(stations):
        if config.mode == "max":
            available[i] = max_visibility_distance(ctx, float(s),
                                                   config.search_step,
                                                   config.cap)
        else:
            for j, dist in enumerate(distances):
                fixed[i, j] = target_visible_at(ctx, float(s), float(dist))
    return VisibilityProfile(stations, available=available,
                             fixed_distances=distances, fixed_visible=fixed,
                             cap=config.cap)
