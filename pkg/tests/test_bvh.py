import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roadsight.bvh import (OcclusionIndex, build_index,
                           segments_hit_bruteforce)
from roadsight.errors import ParameterError
from roadsight.mesh import SceneMesh
from tests.conftest import wall_mesh


def _random_mesh(n_triangles: int, seed: int, extent: float = 10.0) -> SceneMesh:
    rng = np.random.default_rng(seed)
    base = rng.uniform(-extent, extent, size=(n_triangles, 3))
    e1 = rng.uniform(-2, 2, size=(n_triangles, 3))
    e2 = rng.uniform(-2, 2, size=(n_triangles, 3))
    verts = np.concatenate([base, base + e1, base + e2])
    n = n_triangles
    tris = np.column_stack([np.arange(n), np.arange(n) + n,
                            np.arange(n) + 2 * n])
    return SceneMesh(verts, tris, validate=False)


class TestSegmentClear:
    def test_empty_scene_clear(self, empty_mesh_index):
        assert empty_mesh_index.segment_clear([0, 0, 0], [10, 0, 0])

    def test_wall_blocks_and_miss_passes(self):
        index = build_index(wall_mesh(5.0, -1.0, 1.0, 0.0, 2.0))
        assert not index.segment_clear([0, 0, 1], [10, 0, 1])
        assert index.segment_clear([0, 0, 3], [10, 0, 3])  # above the wall
        assert index.segment_clear([0, 5, 1], [10, 5, 1])  # beside the wall

    def test_single_triangle_centroid(self):
        verts = np.array([[5.0, -1, 0], [5.0, 1, 0], [5.0, 0, 2]])
        mesh = SceneMesh(verts, np.array([[0, 1, 2]]))
        index = build_index(mesh)
        centroid = verts.mean(axis=0)
        a = centroid + np.array([-3.0, 0.1, 0.1])
        b = centroid + np.array([3.0, -0.1, -0.1])
        assert not index.segment_clear(a, b)
        assert index.segment_clear(a + [0, 5, 0], b + [0, 5, 0])

    def test_occluder_beyond_endpoint_is_clear(self):
        index = build_index(wall_mesh(20.0, -2.0, 2.0, 0.0, 3.0))
        # wall cuts the extended line but lies past b
        assert index.segment_clear([0, 0, 1], [10, 0, 1])

    def test_degenerate_segment(self, empty_mesh_index):
        with pytest.raises(ParameterError):
            empty_mesh_index.segment_clear([1, 2, 3], [1, 2, 3])

    def test_endpoint_guard_ignores_contact(self):
        index = build_index(wall_mesh(5.0, -1.0, 1.0, 0.0, 2.0))
        # segment starting a hair in front of the wall, going away from it
        a = np.array([5.0 + 1e-8, 0.0, 1.0])
        assert index.segment_clear(a, [10.0, 0.0, 1.0])

    def test_symmetry(self):
        mesh = _random_mesh(50, seed=3)
        index = build_index(mesh)
        rng = np.random.default_rng(4)
        a = rng.uniform(-12, 12, size=(200, 3))
        b = rng.uniform(-12, 12, size=(200, 3))
        np.testing.assert_array_equal(index.segments_hit(a, b),
                                      index.segments_hit(b, a))


class TestIndexOracleEquivalence:
    def test_random_mesh_vs_bruteforce(self):
        mesh = _random_mesh(200, seed=0)
        index = build_index(mesh)
        rng = np.random.default_rng(1)
        a = rng.uniform(-12, 12, size=(1000, 3))
        b = rng.uniform(-12, 12, size=(1000, 3))
        accelerated = index.segments_hit(a, b)
        exhaustive = segments_hit_bruteforce(mesh, a, b)
        assert np.count_nonzero(accelerated != exhaustive) == 0
        assert 0 < np.count_nonzero(accelerated) < 1000  # non-trivial mix

    @given(seed=st.integers(min_value=0, max_value=2 ** 16))
    @settings(max_examples=20, deadline=None)
    def test_equivalence_property(self, seed):
        mesh = _random_mesh(40, seed=seed)
        index = build_index(mesh)
        rng = np.random.default_rng(seed + 1)
        a = rng.uniform(-12, 12, size=(50, 3))
        b = rng.uniform(-12, 12, size=(50, 3))
        np.testing.assert_array_equal(index.segments_hit(a, b),
                                      segments_hit_bruteforce(mesh, a, b))

    def test_leaf_size_variants_agree(self):
        mesh = _random_mesh(150, seed=7)
        rng = np.random.default_rng(8)
        a = rng.uniform(-12, 12, size=(300, 3))
        b = rng.uniform(-12, 12, size=(300, 3))
        r1 = OcclusionIndex(mesh, leaf_size=1).segments_hit(a, b)
        r8 = OcclusionIndex(mesh, leaf_size=8).segments_hit(a, b)
        np.testing.assert_array_equal(r1, r8)


def test_occluder_monotonicity():
    base = wall_mesh(5.0, -1.0, 1.0, 0.0, 1.0)
    taller = wall_mesh(5.0, -1.0, 1.0, 0.0, 3.0)
    both = SceneMesh(np.vstack([base.vertices, taller.vertices]),
                     np.vstack([base.triangles, taller.triangles + 4]))
    rng = np.random.default_rng(5)
    a = rng.uniform([-2, -3, 0], [2, 3, 4], size=(150, 3))
    b = rng.uniform([8, -3, 0], [12, 3, 4], size=(150, 3))
    hits_base = build_index(base).segments_hit(a, b)
    hits_both = build_index(both).segments_hit(a, b)
    # adding triangles never unblocks a segment
    assert not np.any(hits_base & ~hits_both)


def test_empty_mesh_index_reports_no_hits(empty_mesh_index):
    rng = np.random.default_rng(6)
    a = rng.uniform(-5, 5, size=(20, 3))
    b = rng.uniform(-5, 5, size=(20, 3))
    assert not empty_mesh_index.segments_hit(a, b).any()


class TestIndexStructure:
    def test_leaves_partition_triangles_and_boxes_nest(self):
        mesh = _random_mesh(137, seed=12)
        index = OcclusionIndex(mesh, leaf_size=8)
        seen = []
        for node in range(len(index.node_left)):
            left = index.node_left[node]
            if left < 0:  # leaf
                start, end = -left - 1, index.node_right[node]
                assert end - start <= 8
                seen.extend(range(start, end))
            else:
                for child in (left, index.node_right[node]):
                    assert np.all(index.node_min[node]
                                  <= index.node_min[child] + 1e-12)
                    assert np.all(index.node_max[node]
                                  >= index.node_max[child] - 1e-12)
        # every triangle lands in exactly one leaf
        assert sorted(seen) == list(range(137))

    def test_triangles_inside_their_leaf_boxes(self):
        mesh = _random_mesh(64, seed=13)
        index = OcclusionIndex(mesh, leaf_size=4)
        for node in range(len(index.node_left)):
            left = index.node_left[node]
            if left >= 0:
                continue
            start, end = -left - 1, index.node_right[node]
            for t in range(start, end):
                corners = np.array([index.v0[t], index.v0[t] + index.e1[t],
                                    index.v0[t] + index.e2[t]])
                assert np.all(corners >= index.node_min[node] - 1e-9)
                assert np.all(corners <= index.node_max[node] + 1e-9)
