import numpy as np
import pytest

from roadsight.cloud import ScanCloud
from roadsight.errors import ParameterError
from roadsight.planes import extract_planes, fit_plane


def _patch(n_side: int, spacing: float, origin=(0.0, 0.0)) -> np.ndarray:
    xs = origin[0] + np.arange(n_side) * spacing
    ys = origin[1] + np.arange(n_side) * spacing
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])


def test_exact_plane_single_region():
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(0, 50, 1000), rng.uniform(0, 50, 1000),
                           np.zeros(1000)])
    regions = extract_planes(ScanCloud(pts), dist_tol=0.01, min_inliers=50,
                             connect_radius=5.0)
    assert len(regions) == 1
    assert regions[0].inlier_indices.size == 1000
    assert regions[0].rms == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(regions[0].normal), [0, 0, 1], atol=1e-12)


def test_coplanar_patches_split_by_connectivity():
    # two 10x10 m patches on the same plane, 50 m apart
    a = _patch(21, 0.5, origin=(0.0, 0.0))
    b = _patch(21, 0.5, origin=(60.0, 0.0))
    cloud = ScanCloud(np.vstack([a, b]))
    regions = extract_planes(cloud, dist_tol=0.02, min_inliers=50,
                             connect_radius=1.0)
    assert len(regions) == 2
    sizes = sorted(r.inlier_indices.size for r in regions)
    assert sizes == [441, 441]


def test_below_threshold_returns_empty():
    rng = np.random.default_rng(1)
    pts = rng.uniform(0, 10, size=(100, 3))
    regions = extract_planes(ScanCloud(pts), dist_tol=0.01, min_inliers=200,
                             connect_radius=2.0)
    assert regions == []


def test_every_inlier_within_tolerance():
    rng = np.random.default_rng(2)
    base = np.column_stack([rng.uniform(0, 20, 800), rng.uniform(0, 20, 800),
                            rng.normal(0, 0.01, 800)])
    noise = rng.uniform([0, 0, 1], [20, 20, 5], size=(150, 3))
    cloud = ScanCloud(np.vstack([base, noise]))
    regions = extract_planes(cloud, dist_tol=0.03, min_inliers=100,
                             connect_radius=3.0, seed=5)
    assert regions
    for region in regions:
        dist = region.distances(cloud.xyz[region.inlier_indices])
        assert np.all(dist <= 0.03 + 1e-12)
        assert abs(np.linalg.norm(region.normal) - 1.0) < 1e-9


def test_deterministic_for_fixed_seed():
    rng = np.random.default_rng(3)
    pts = np.vstack([
        np.column_stack([rng.uniform(0, 30, 600), rng.uniform(0, 30, 600),
                         rng.normal(0, 0.005, 600)]),
        np.column_stack([np.full(300, 10.0) + rng.normal(0, 0.005, 300),
                         rng.uniform(0, 30, 300), rng.uniform(0, 4, 300)]),
    ])
    cloud = ScanCloud(pts)
    kw = dict(dist_tol=0.02, min_inliers=80, connect_radius=3.0, seed=42)
    first = extract_planes(cloud, **kw)
    second = extract_planes(cloud, **kw)
    assert len(first) == len(second)
    for r1, r2 in zip(first, second):
        np.testing.assert_array_equal(r1.inlier_indices, r2.inlier_indices)
        np.testing.assert_allclose(r1.normal, r2.normal, atol=0)


def test_two_orthogonal_planes_found():
    rng = np.random.default_rng(4)
    ground = np.column_stack([rng.uniform(0, 20, 700),
                              rng.uniform(0, 20, 700),
                              rng.normal(0, 0.003, 700)])
    wall = np.column_stack([rng.uniform(0, 20, 500),
                            np.full(500, 5.0) + rng.normal(0, 0.003, 500),
                            rng.uniform(0, 3, 500)])
    cloud = ScanCloud(np.vstack([ground, wall]))
    regions = extract_planes(cloud, dist_tol=0.02, min_inliers=200,
                             connect_radius=3.0, seed=0)
    assert len(regions) == 2
    normals = sorted(tuple(np.round(np.abs(r.normal), 2)) for r in regions)
    assert normals[0] == pytest.approx((0.0, 0.0, 1.0), abs=0.05)
    assert normals[1] == pytest.approx((0.0, 1.0, 0.0), abs=0.05)


def test_parameter_guards():
    cloud = ScanCloud(np.zeros((10, 3)))
    with pytest.raises(ParameterError):
        extract_planes(cloud, dist_tol=0.0, min_inliers=10)
    with pytest.raises(ParameterError):
        extract_planes(cloud, dist_tol=0.1, min_inliers=2)


def test_fit_plane_recovers_offset():
    rng = np.random.default_rng(5)
    normal = np.array([1.0, 2.0, 3.0]) / np.sqrt(14.0)
    basis = np.linalg.svd(normal[None, :])[2][1:]
    uv = rng.uniform(-5, 5, size=(200, 2))
    pts = uv @ basis + 4.0 * normal
    n_fit, off = fit_plane(pts)
    assert abs(abs(n_fit @ normal) - 1.0) < 1e-9
    assert abs(off - 4.0 * np.sign(n_fit @ normal)) < 1e-9
