"""End-to-end cloud-to-mesh pipeline: decimate, strip overhead artefacts,
extract planes, triangulate each region (and, by default, the unmodeled
leftovers) with ball pivoting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bpa import triangulate_bpa
from .cloud import ScanCloud, decimate_profiles, remove_overhead
from .errors import ParameterError
from .mesh import SceneMesh, empty_mesh, merge_meshes
from .planes import extract_planes, kth_neighbor_spacing
from .trajectory import Trajectory


@dataclass(frozen=True)
class PipelineConfig:
    keep_every: int = 5
    half_width: float = 4.0
    clearance: float = 0.3
    dist_tol: float = 0.05
    min_inliers: int = 50
    connect_radius: float | None = None  # None: 4x mean point spacing
    max_planes: int = 8
    ransac_iterations: int = 500
    seed: int = 0
    # plane regions are resampled on a plane-aligned grid before meshing;
    # None keeps every inlier (maximum silhouette fidelity, minimum reduction)
    region_spacing: float | None = 0.5
    bpa_radius: float | None = None  # None: 1.3x mean nearest-neighbor spacing
    triangulate_leftovers: bool = True

    def __post_init__(self):
        if self.keep_every < 1:
            raise ParameterError(f"keep_every must be >= 1, got {self.keep_every}")
        if self.dist_tol <= 0:
            raise ParameterError("dist_tol must be > 0")
        if self.min_inliers < 3:
            raise ParameterError("min_inliers must be >= 3")
        if self.region_spacing is not None and self.region_spacing <= 0:
            raise ParameterError("region_spacing must be > 0 or null")
        if self.bpa_radius is not None and self.bpa_radius <= 0:
            raise ParameterError("bpa_radius must be > 0 or null")


@dataclass
class PipelineReport:
    input_points: int = 0
    after_decimation: int = 0
    after_overhead_removal: int = 0
    plane_regions: list = field(default_factory=list)
    unmodeled_points: int = 0
    mesh_vertices: int = 0
    mesh_triangles: int = 0
    raw_triangle_estimate: int = 0
    reduction_factor: float | None = None

    def to_dict(self) -> dict:
        return {
            "input_points": self.input_points,
            "after_decimation": self.after_decimation,
            "after_overhead_removal": self.after_overhead_removal,
            "plane_regions": self.plane_regions,
            "unmodeled_points": self.unmodeled_points,
            "mesh_vertices": self.mesh_vertices,
            "mesh_triangles": self.mesh_triangles,
            "raw_triangle_estimate": self.raw_triangle_estimate,
            "reduction_factor": self.reduction_factor,
        }


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic in-plane orthonormal basis."""
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(normal)))] = 1.0
    e1 = np.cross(normal, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(normal, e1)


def resample_region(points: np.ndarray, normal: np.ndarray,
                    cell: float) -> np.ndarray:
    """One representative point per plane-aligned grid cell.

    Keeps the inlier closest to each occupied cell center (ties: lowest
    index), preserving region borders to within one cell.
    """
    e1, e2 = _plane_basis(normal)
    u = points @ e1
    v = points @ e2
    iu = np.floor(u / cell).astype(np.int64)
    iv = np.floor(v / cell).astype(np.int64)
    du = u - (iu + 0.5) * cell
    dv = v - (iv + 0.5) * cell
    d2 = du * du + dv * dv
    order = np.lexsort((np.arange(len(points)), d2, iv, iu))
    siu, siv = iu[order], iv[order]
    first = np.concatenate(([True], (siu[1:] != siu[:-1]) | (siv[1:] != siv[:-1])))
    return points[np.sort(order[first])]


def _auto_radius(points: np.ndarray) -> float:
    return 1.3 * kth_neighbor_spacing(points, k=6)


def build_scene(cloud: ScanCloud, traj: Trajectory,
                config: PipelineConfig = PipelineConfig()
                ) -> tuple[SceneMesh, PipelineReport]:
    """Run the full reduction pipeline; deterministic for a fixed seed."""
    report = PipelineReport(input_points=len(cloud),
                            raw_triangle_estimate=2 * len(cloud))
    if len(cloud) == 0:
        return empty_mesh(), report

    dec = decimate_profiles(cloud, config.keep_every)
    report.after_decimation = len(dec)

    kept = remove_overhead(dec, traj, config.half_width, config.clearance)
    report.after_overhead_removal = len(kept)
    if len(kept) < 3:
        return empty_mesh(), report

    regions = extract_planes(kept, dist_tol=config.dist_tol,
                             min_inliers=config.min_inliers,
                             connect_radius=config.connect_radius,
                             max_planes=config.max_planes,
                             iterations=config.ransac_iterations,
                             seed=config.seed)
    parts: list[tuple[SceneMesh, str]] = []
    modeled = np.zeros(len(kept), dtype=bool)
    for r_i, region in enumerate(regions):
        modeled[region.inlier_indices] = True
        pts = kept.xyz[region.inlier_indices]
        if config.region_spacing is not None:
            pts = resample_region(pts, region.normal, config.region_spacing)
        radius = config.bpa_radius or _auto_radius(pts)
        part = triangulate_bpa(pts, radius)
        parts.append((part, f"plane_{r_i}"))
        report.plane_regions.append({
            "inliers": int(region.inlier_indices.size),
            "rms": region.rms,
            "normal": [float(c) for c in region.normal],
            "offset": region.offset,
            "mesh_points": int(len(pts)),
            "triangles": part.n_triangles,
        })
    leftovers = np.nonzero(~modeled)[0]
    report.unmodeled_points = int(leftovers.size)
    if config.triangulate_leftovers and leftovers.size >= 3:
        pts = kept.xyz[leftovers]
        radius = config.bpa_radius or _auto_radius(pts)
        parts.append((triangulate_bpa(pts, radius), "unmodeled"))

    mesh = merge_meshes(parts)
    report.mesh_vertices = mesh.n_vertices
    report.mesh_triangles = mesh.n_triangles
    if mesh.n_triangles > 0:
        report.reduction_factor = report.raw_triangle_estimate / mesh.n_triangles
    return mesh, report
