"""Synthetic corridor scenes with closed-form sight-distance oracles.

Each generator emits the scene either as a ready mesh (for engine tests) or
as a raw scan cloud with per-profile indices (to exercise the full pipeline),
together with the centerline trajectory. The analytic oracles are validated
against independent 2D brute-force grazing checks in the test suite before
they back any acceptance assertion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import ScanCloud
from .errors import ParameterError
from .mesh import SceneMesh, grid_mesh, merge_meshes
from .trajectory import Trajectory


@dataclass(frozen=True)
class SynthScene:
    """A generated corridor: mesh or cloud, its trajectory, oracle metadata."""

    mesh: SceneMesh | None
    cloud: ScanCloud | None
    traj: Trajectory
    oracle: dict


def crest_sight_distance(vertical_radius: float, h1: float, h2: float) -> float:
    """Grazing distance over a parabolic crest between heights h1 and h2."""
    return float(np.sqrt(2.0 * vertical_radius) * (np.sqrt(h1) + np.sqrt(h2)))


def bend_sight_distance(radius: float, offset: float) -> float:
    """Arc length at which the sight chord grazes an inside-curve obstruction."""
    return float(2.0 * radius * np.arccos(1.0 - offset / radius))


def _surface_grid(xs: np.ndarray, ys: np.ndarray, z_of_x) -> np.ndarray:
    """Row-major (per-x scanline) grid over a z(x) surface."""
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    zz = np.broadcast_to(z_of_x(xs)[:, None], xx.shape)
    return np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])


def _grid_cloud(points: np.ndarray, n_rows: int, n_cols: int,
                jitter: float = 0.0, seed: int = 0) -> ScanCloud:
    profile = np.repeat(np.arange(n_rows), n_cols)
    if jitter > 0:
        rng = np.random.default_rng(seed)
        points = points + rng.uniform(-jitter, jitter, size=points.shape)
    return ScanCloud(points, profile_id=profile)


def gen_straight(length: float, width: float, spacing: float,
                 kind: str = "mesh", jitter: float = 0.0,
                 seed: int = 0) -> SynthScene:
    """Flat rectangular road surface with a centerline trajectory."""
    if min(length, width, spacing) <= 0:
        raise ParameterError("length, width and spacing must be > 0")
    xs = np.arange(0.0, length + spacing / 2.0, spacing)
    ys = np.arange(-width / 2.0, width / 2.0 + spacing / 2.0, spacing)
    pts = _surface_grid(xs, ys, lambda x: np.zeros_like(x))
    traj = _straight_trajectory(length)
    oracle = {"kind": "straight", "length": length, "width": width,
              "expected": "cap"}
    if kind == "cloud":
        return SynthScene(None, _grid_cloud(pts, len(xs), len(ys), jitter, seed),
                          traj, oracle)
    return SynthScene(grid_mesh(pts, len(xs), len(ys)), None, traj, oracle)


def _straight_trajectory(length: float) -> Trajectory:
    step = min(5.0, length / 4.0)
    s = np.arange(0.0, length + step / 2.0, step)
    if abs(s[-1] - length) > 1e-9:
        s = np.append(s, length)
    xyz = np.column_stack([s, np.zeros_like(s), np.zeros_like(s)])
    return Trajectory(s, xyz, kappa=np.zeros_like(s), grade=np.zeros_like(s))


def gen_crest(vertical_radius: float, length: float = 500.0,
              width: float = 7.5, kind: str = "mesh", mesh_dx: float = 1.0,
              cloud_spacing: float = 0.25) -> SynthScene:
    """Parabolic crest z = -x^2 / (2 R_v) around the summit.

    Oracle: a sight line from height h1 grazes the crest down to height h2 at
    distance sqrt(2 R_v) (sqrt(h1) + sqrt(h2)), valid while that stays inside
    the corridor.
    """
    if vertical_radius <= 0:
        raise ParameterError("vertical_radius must be > 0")
    if length / 2.0 >= 0.5 * vertical_radius:
        raise ParameterError("corridor too long for this vertical radius "
                             "(end grade would reach 50%)")
    half = length / 2.0

    def z_of(x):
        return -np.square(x) / (2.0 * vertical_radius)

    dx = mesh_dx if kind == "mesh" else cloud_spacing
    xs = np.arange(-half, half + dx / 2.0, dx)
    n_cols = 9 if kind == "mesh" else max(2, int(round(width / dx)) + 1)
    ys = np.linspace(-width / 2.0, width / 2.0, n_cols)
    pts = _surface_grid(xs, ys, z_of)

    tx = np.arange(-half, half + 0.25, 0.5)
    tz = z_of(tx)
    seg = np.sqrt(np.diff(tx) ** 2 + np.diff(tz) ** 2)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    xyz = np.column_stack([tx, np.zeros_like(tx), tz])
    traj = Trajectory(s, xyz, kappa=np.zeros_like(s),
                      grade=-tx / vertical_radius)
    oracle = {"kind": "crest", "vertical_radius": vertical_radius,
              "length": length,
              "sight_distance_eye1.0_lamp0.6":
                  crest_sight_distance(vertical_radius, 1.0, 0.6)}
    if kind == "cloud":
        return SynthScene(None, _grid_cloud(pts, len(xs), len(ys)), traj, oracle)
    return SynthScene(grid_mesh(pts, len(xs), len(ys)), None, traj, oracle)


def gen_bend_wall(radius: float, wall_offset: float, wall_height: float = 3.0,
                  arc_length: float = 300.0, width: float = 7.0,
                  kind: str = "mesh", arc_step: float = 1.0,
                  wall_dz: float = 0.25) -> SynthScene:
    """Flat circular bend with a continuous vertical wall inside the curve.

    The wall sits at lateral offset wall_offset toward the curve center and
    rises above any conventional eye or target height. Oracle: the sight
    chord grazes the wall at arc length 2 R arccos(1 - offset / R).
    """
    if radius <= 0:
        raise ParameterError("radius must be > 0")
    if not (0 < wall_offset < radius):
        raise ParameterError("wall_offset must satisfy 0 < offset < radius")
    if wall_height <= 0:
        raise ParameterError("wall_height must be > 0")
    center = np.array([0.0, radius])
    thetas = np.arange(0.0, arc_length / radius + arc_step / (2 * radius),
                       arc_step / radius)

    def ring(r: float, z: float) -> np.ndarray:
        return np.column_stack([center[0] + r * np.sin(thetas),
                                center[1] - r * np.cos(thetas),
                                np.full_like(thetas, z)])

    # road strip: radial grid, one scanline per angular step
    radii = np.linspace(radius + width / 2.0, radius - width / 2.0, 8)
    road_pts = np.concatenate([np.column_stack([
        center[0] + r * np.sin(thetas), center[1] - r * np.cos(thetas),
        np.zeros_like(thetas)]) for r in radii])
    # reorder row-major per theta for grid meshing
    road_grid = road_pts.reshape(len(radii), len(thetas), 3).transpose(1, 0, 2)
    road_mesh = grid_mesh(road_grid.reshape(-1, 3), len(thetas), len(radii))

    wall_r = radius - wall_offset
    z_levels = np.linspace(0.0, wall_height, 4)
    wall_grid = np.stack([ring(wall_r, z) for z in z_levels], axis=1)
    wall_mesh = grid_mesh(wall_grid.reshape(-1, 3), len(thetas), len(z_levels))

    s = radius * thetas
    xyz = ring(radius, 0.0)
    heading = np.column_stack([np.cos(thetas), np.sin(thetas),
                               np.zeros_like(thetas)])
    traj = Trajectory(s, xyz, heading=heading,
                      kappa=np.full_like(s, 1.0 / radius),
                      grade=np.zeros_like(s))
    oracle = {"kind": "bend_wall", "radius": radius,
              "wall_offset": wall_offset,
              "sight_distance": bend_sight_distance(radius, wall_offset)}
    if kind == "cloud":
        n_theta = len(thetas)
        # scanners sample the wall much denser vertically than the 4 mesh rows
        z_cloud = np.arange(0.0, wall_height + wall_dz / 2.0, wall_dz)
        wall_cloud = np.stack([ring(wall_r, z) for z in z_cloud], axis=1)
        road_view = road_grid.reshape(n_theta, len(radii), 3)
        pts = np.concatenate([np.concatenate([road_view[i], wall_cloud[i]])
                              for i in range(n_theta)])
        per_profile = len(radii) + len(z_cloud)
        profile = np.repeat(np.arange(n_theta), per_profile)
        return SynthScene(None, ScanCloud(pts, profile_id=profile), traj, oracle)
    return SynthScene(merge_meshes([(road_mesh, "road"), (wall_mesh, "wall")]),
                      None, traj, oracle)


def box_surface_points(center: np.ndarray, size: tuple[float, float, float],
                       spacing: float) -> np.ndarray:
    """Point samples on all six faces of an axis-aligned box (artefact fixture)."""
    cx, cy, cz = center
    sx, sy, sz = size
    xs = np.arange(-sx / 2, sx / 2 + spacing / 2, spacing)
    ys = np.arange(-sy / 2, sy / 2 + spacing / 2, spacing)
    zs = np.arange(-sz / 2, sz / 2 + spacing / 2, spacing)
    faces = []
    for sign in (-1, 1):
        yy, zz = np.meshgrid(ys, zs, indexing="ij")
        faces.append(np.column_stack([np.full(yy.size, sign * sx / 2),
                                      yy.ravel(), zz.ravel()]))
        xx, zz = np.meshgrid(xs, zs, indexing="ij")
        faces.append(np.column_stack([xx.ravel(),
                                      np.full(xx.size, sign * sy / 2),
                                      zz.ravel()]))
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        faces.append(np.column_stack([xx.ravel(), yy.ravel(),
                                      np.full(xx.size, sign * sz / 2)]))
    pts = np.vstack(faces)
    return pts + np.array([cx, cy, cz])
