"""Seeded RANSAC plane extraction with region-growing connectivity splits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .cloud import ScanCloud
from .errors import ParameterError

DEFAULT_RANSAC_ITERS = 500


@dataclass(frozen=True)
class PlaneRegion:
    """One connected, planar patch: fitted plane plus its supporting points."""

    normal: np.ndarray        # (3,) unit
    offset: float             # n . p = offset for points p on the plane
    inlier_indices: np.ndarray  # indices into the source cloud
    rms: float                # RMS point-to-plane distance of the inliers

    def distances(self, xyz: np.ndarray) -> np.ndarray:
        return np.abs(xyz @ self.normal - self.offset)


def fit_plane(xyz: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares plane (unit normal, offset) through a point set."""
    centroid = xyz.mean(axis=0)
    _, _, vt = np.linalg.svd(xyz - centroid, full_matrices=False)
    normal = vt[-1]
    # deterministic sign: make the largest-magnitude component positive
    lead = np.argmax(np.abs(normal))
    if normal[lead] < 0:
        normal = -normal
    return normal, float(normal @ centroid)


def _connected_splits(xyz: np.ndarray, radius: float) -> list[np.ndarray]:
    """Indices of connected components under fixed-radius adjacency."""
    tree = cKDTree(xyz)
    pairs = tree.query_pairs(r=radius, output_type="ndarray")
    n = len(xyz)
    if len(pairs) == 0:
        return [np.array([i]) for i in range(n)]
    ones = np.ones(len(pairs))
    graph = coo_matrix((ones, (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    n_comp, labels = connected_components(graph, directed=False)
    return [np.nonzero(labels == c)[0] for c in range(n_comp)]


def extract_planes(cloud: ScanCloud, dist_tol: float, min_inliers: int,
                   connect_radius: float | None = None,
                   max_planes: int = 8,
                   iterations: int = DEFAULT_RANSAC_ITERS,
                   seed: int = 0) -> list[PlaneRegion]:
    """Repeatedly fit the dominant plane and peel off its connected regions.

    Each round draws `iterations` random 3-point hypotheses from the points
    not yet assigned, keeps the one with the most inliers within dist_tol
    (ties: lowest inlier RMS, then lowest hypothesis index), refits it by
    least squares, then splits the inliers into connected components with
    neighbor radius connect_radius. Components of at least min_inliers become
    PlaneRegions and their points leave the pool; everything left at the end
    is unmodeled. Deterministic for a fixed seed.
    """
    if dist_tol <= 0:
        raise ParameterError(f"dist_tol must be > 0, got {dist_tol}")
    if min_inliers < 3:
        raise ParameterError(f"min_inliers must be >= 3, got {min_inliers}")
    if max_planes < 1:
        raise ParameterError(f"max_planes must be >= 1, got {max_planes}")
    xyz = cloud.xyz
    rng = np.random.default_rng(seed)
    remaining = np.arange(len(xyz))
    regions: list[PlaneRegion] = []

    if connect_radius is None:
        connect_radius = 4.0 * kth_neighbor_spacing(xyz, k=4)

    while len(remaining) >= min_inliers and len(regions) < max_planes:
        pts = xyz[remaining]
        best = _best_hypothesis(pts, rng, iterations, dist_tol)
        if best is None or best[0].size < min_inliers:
            break
        hyp_inliers = best[0]
        # refit on the hypothesis inliers, then re-select within tolerance so
        # every accepted point provably sits within dist_tol of its plane
        normal, offset = fit_plane(pts[hyp_inliers])
        dist = np.abs(pts @ normal - offset)
        inliers = np.nonzero(dist <= dist_tol)[0]
        if inliers.size < min_inliers:
            break
        components = _connected_splits(pts[inliers], connect_radius)
        components.sort(key=lambda c: (-c.size, int(c[0])))
        accepted_local: list[np.ndarray] = []
        for comp in components:
            if len(regions) + len(accepted_local) >= max_planes:
                break
            if comp.size < min_inliers:
                continue
            comp_idx = inliers[comp]
            n_c, off_c = fit_plane(pts[comp_idx])
            d_c = np.abs(pts[comp_idx] @ n_c - off_c)
            inside = d_c <= dist_tol
            if np.count_nonzero(inside) < min_inliers:
                continue
            comp_idx = comp_idx[inside]
            n_c, off_c = fit_plane(pts[comp_idx])
            d_c = np.abs(pts[comp_idx] @ n_c - off_c)
            if np.any(d_c > dist_tol):
                # second refit moved a stray point out; drop and accept rest
                comp_idx = comp_idx[d_c <= dist_tol]
                if comp_idx.size < min_inliers:
                    continue
                n_c, off_c = fit_plane(pts[comp_idx])
                d_c = np.abs(pts[comp_idx] @ n_c - off_c)
                if np.any(d_c > dist_tol):
                    continue
            regions.append(PlaneRegion(
                normal=n_c, offset=off_c,
                inlier_indices=remaining[comp_idx],
                rms=float(np.sqrt(np.mean(d_c ** 2)))))
            accepted_local.append(comp_idx)
        if not accepted_local:
            break
        used = np.concatenate(accepted_local)
        mask = np.ones(len(remaining), dtype=bool)
        mask[used] = False
        remaining = remaining[mask]
    return regions


def _best_hypothesis(pts: np.ndarray, rng: np.random.Generator,
                     iterations: int, dist_tol: float):
    """Best 3-point plane over a fixed hypothesis budget.

    Returns (inlier_positions, count, rms, index) or None when every draw is
    degenerate.
    """
    n = len(pts)
    best = None
    triples = rng.integers(0, n, size=(iterations, 3))
    for h in range(iterations):
        i, j, k = triples[h]
        if i == j or j == k or i == k:
            continue
        a, b, c = pts[i], pts[j], pts[k]
        normal = np.cross(b - a, c - a)
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            continue
        normal = normal / norm
        offset = normal @ a
        dist = np.abs(pts @ normal - offset)
        inliers = dist <= dist_tol
        count = int(np.count_nonzero(inliers))
        if count < 3:
            continue
        rms = float(np.sqrt(np.mean(dist[inliers] ** 2)))
        key = (-count, rms, h)
        if best is None or key < best[0]:
            best = (key, np.nonzero(inliers)[0])
    if best is None:
        return None
    return best[1], -best[0][0], best[0][1], best[0][2]


def kth_neighbor_spacing(xyz: np.ndarray, k: int = 4,
                         sample: int = 2000) -> float:
    """Median distance to the k-th nearest neighbor (deterministic subsample).

    More robust than the 1st-neighbor distance on anisotropic scan grids,
    where the along-profile spacing can be several times finer than the
    profile-to-profile spacing.
    """
    n = len(xyz)
    if n < 2:
        return 1.0
    k = min(k, n - 1)
    tree = cKDTree(xyz)
    if n > sample:
        idx = np.linspace(0, n - 1, sample).astype(np.int64)
        query = xyz[idx]
    else:
        query = xyz
    d, _ = tree.query(query, k=k + 1)
    return float(np.median(d[:, k]))
