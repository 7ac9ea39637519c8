"""Mobile-mapping point cloud: per-profile decimation and overhead artefact
removal around the carrier trajectory."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import IngestionError, ParameterError
from .trajectory import Trajectory


class ScanCloud:
    """LIDAR points with optional per-scanline profile indices.

    Points within a profile keep acquisition order; profile ids are
    non-decreasing over the acquisition.
    """

    __slots__ = ("xyz", "profile_id", "intensity")

    def __init__(self, xyz, profile_id=None, intensity=None):
        xyz = np.ascontiguousarray(xyz, dtype=np.float64).reshape(-1, 3)
        if not np.all(np.isfinite(xyz)):
            raise IngestionError("non-finite point coordinates")
        if profile_id is not None:
            profile_id = np.ascontiguousarray(profile_id, dtype=np.int64)
            if profile_id.shape != (len(xyz),):
                raise IngestionError("profile_id length mismatch")
        if intensity is not None:
            intensity = np.ascontiguousarray(intensity, dtype=np.float64)
            if intensity.shape != (len(xyz),):
                raise IngestionError("intensity length mismatch")
        self.xyz = xyz
        self.profile_id = profile_id
        self.intensity = intensity

    def __len__(self) -> int:
        return len(self.xyz)

    def take(self, indices: np.ndarray) -> "ScanCloud":
        return ScanCloud(
            self.xyz[indices],
            None if self.profile_id is None else self.profile_id[indices],
            None if self.intensity is None else self.intensity[indices])


def decimate_profiles(cloud: ScanCloud, keep_every: int) -> ScanCloud:
    """Keep every keep_every-th point within each scanline profile.

    Without profile ids the whole cloud is treated as a single profile.
    Output order follows the input; each profile retains ceil(n/k) points.
    """
    k = int(keep_every)
    if k < 1:
        raise ParameterError(f"keep_every must be >= 1, got {keep_every}")
    if k == 1 or len(cloud) == 0:
        return cloud.take(np.arange(len(cloud)))
    if cloud.profile_id is None:
        return cloud.take(np.arange(0, len(cloud), k))
    # rank of each point within its profile, in acquisition order
    pid = cloud.profile_id
    change = np.concatenate(([True], pid[1:] != pid[:-1]))
    # positions within runs of equal profile id
    idx = np.arange(len(pid))
    run_start = np.maximum.accumulate(np.where(change, idx, 0))
    rank = idx - run_start
    return cloud.take(np.nonzero(rank % k == 0)[0])


def _horizontal_distance_to_polyline(points_xy: np.ndarray,
                                     poly_xy: np.ndarray) -> np.ndarray:
    """Distance from each point to the horizontal projection of a polyline."""
    best = np.full(len(points_xy), np.inf)
    for i in range(len(poly_xy) - 1):
        a = poly_xy[i]
        ab = poly_xy[i + 1] - a
        denom = float(ab @ ab)
        if denom < 1e-18:
            d = np.linalg.norm(points_xy - a, axis=1)
        else:
            t = np.clip(((points_xy - a) @ ab) / denom, 0.0, 1.0)
            proj = a + t[:, None] * ab
            d = np.linalg.norm(points_xy - proj, axis=1)
        np.minimum(best, d, out=best)
    return best


def remove_overhead(cloud: ScanCloud, traj: Trajectory, half_width: float,
                    clearance: float) -> ScanCloud:
    """Drop points hanging over the carriageway corridor.

    A point is removed when it lies within half_width (horizontally) of the
    trajectory polyline AND more than clearance above the road surface, taken
    as the z of the nearest station. Points at or below surface + clearance
    are always kept.
    """
    if half_width <= 0:
        raise ParameterError(f"half_width must be > 0, got {half_width}")
    if clearance <= 0:
        raise ParameterError(f"clearance must be > 0, got {clearance}")
    if len(cloud) == 0:
        return cloud
    lateral = _horizontal_distance_to_polyline(cloud.xyz[:, :2], traj.xyz[:, :2])
    tree = cKDTree(traj.xyz[:, :2])
    _, nearest = tree.query(cloud.xyz[:, :2])
    height = cloud.xyz[:, 2] - traj.xyz[nearest, 2]
    keep = ~((lateral <= half_width) & (height > clearance))
    return cloud.take(np.nonzero(keep)[0])
