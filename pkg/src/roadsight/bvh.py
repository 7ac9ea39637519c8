"""Segment-vs-mesh occlusion queries over a bounding-volume hierarchy.

The index answers "does the open segment (a, b) hit any triangle", with a
small metric guard around both endpoints so eye/target points resting on the
reconstructed surface never self-intersect. Occluders block regardless of
winding: meshes rebuilt from point clouds have no consistent orientation.

An exhaustive all-triangles test with identical arithmetic is exposed for
verification; the hierarchy must agree with it exactly.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .mesh import SceneMesh

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


ENDPOINT_GUARD = 1e-6  # meters ignored at both ends of every segment
_BARY_TOL = 1e-10      # slack so edge-grazing hits register on a neighbor
_DET_TOL = 1e-14
_BOX_PAD = 1e-9

__all__ = ["OcclusionIndex", "build_index", "segments_hit_bruteforce",
           "ENDPOINT_GUARD", "HAVE_NUMBA"]


@njit(cache=True)
def _any_hit_kernel(node_min, node_max, node_left, node_right,
                    v0, e1, e2, origins, deltas, guard, out):  # pragma: no cover
    n_queries = origins.shape[0]
    stack = np.empty(128, dtype=np.int64)
    for q in range(n_queries):
        ox, oy, oz = origins[q, 0], origins[q, 1], origins[q, 2]
        dx, dy, dz = deltas[q, 0], deltas[q, 1], deltas[q, 2]
        seg_len = math.sqrt(dx * dx + dy * dy + dz * dz)
        if seg_len <= 2.0 * guard:
            out[q] = False
            continue
        t_lo = guard / seg_len
        t_hi = 1.0 - t_lo
        hit = False
        sp = 0
        stack[0] = 0
        sp = 1
        while sp > 0 and not hit:
            sp -= 1
            node = stack[sp]
            # slab test against the segment parameter interval
            tmin = t_lo
            tmax = t_hi
            ok = True
            for ax in range(3):
                o = origins[q, ax]
                d = deltas[q, ax]
                mn = node_min[node, ax]
                mx = node_max[node, ax]
                if d == 0.0:
                    if o < mn or o > mx:
                        ok = False
                        break
                else:
                    inv = 1.0 / d
                    ta = (mn - o) * inv
                    tb = (mx - o) * inv
                    if ta > tb:
                        ta, tb = tb, ta
                    if ta > tmin:
                        tmin = ta
                    if tb < tmax:
                        tmax = tb
                    if tmin > tmax:
                        ok = False
                        break
            if not ok:
                continue
            left = node_left[node]
            if left >= 0:
                stack[sp] = left
                sp += 1
                stack[sp] = node_right[node]
                sp += 1
                continue
            start = -left - 1
            end = node_right[node]
            for t_i in range(start, end):
                e1x, e1y, e1z = e1[t_i, 0], e1[t_i, 1], e1[t_i, 2]
                e2x, e2y, e2z = e2[t_i, 0], e2[t_i, 1], e2[t_i, 2]
                px = dy * e2z - dz * e2y
                py = dz * e2x - dx * e2z
                pz = dx * e2y - dy * e2x
                det = e1x * px + e1y * py + e1z * pz
                if det > -_DET_TOL and det < _DET_TOL:
                    continue
                inv_det = 1.0 / det
                sx = ox - v0[t_i, 0]
                sy = oy - v0[t_i, 1]
                sz = oz - v0[t_i, 2]
                u = (sx * px + sy * py + sz * pz) * inv_det
                if u < -_BARY_TOL or u > 1.0 + _BARY_TOL:
                    continue
                qx = sy * e1z - sz * e1y
                qy = sz * e1x - sx * e1z
                qz = sx * e1y - sy * e1x
                v = (dx * qx + dy * qy + dz * qz) * inv_det
                if v < -_BARY_TOL or u + v > 1.0 + _BARY_TOL:
                    continue
                t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
                if t > t_lo and t < t_hi:
                    hit = True
                    break
        out[q] = hit


def _moller_trumbore_any(v0, e1, e2, origin, delta, t_lo, t_hi) -> bool:
    """Vectorized any-hit over all triangles; arithmetic mirrors the kernel."""
    d = delta
    p = np.cross(np.broadcast_to(d, e2.shape), e2)
    det = np.einsum("ij,ij->i", e1, p)
    alive = np.abs(det) >= _DET_TOL
    if not np.any(alive):
        return False
    inv_det = np.zeros_like(det)
    inv_det[alive] = 1.0 / det[alive]
    s = origin - v0
    u = np.einsum("ij,ij->i", s, p) * inv_det
    alive &= (u >= -_BARY_TOL) & (u <= 1.0 + _BARY_TOL)
    q = np.cross(s, e1)
    v = (q @ d) * inv_det
    alive &= (v >= -_BARY_TOL) & (u + v <= 1.0 + _BARY_TOL)
    t = np.einsum("ij,ij->i", e2, q) * inv_det
    alive &= (t > t_lo) & (t < t_hi)
    return bool(np.any(alive))


def segments_hit_bruteforce(mesh: SceneMesh, a: np.ndarray, b: np.ndarray,
                            guard: float = ENDPOINT_GUARD) -> np.ndarray:
    """Exhaustive segment-occlusion test used as the verification oracle."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    out = np.zeros(len(a), dtype=bool)
    if mesh.is_empty():
        return out
    v0 = mesh.vertices[mesh.triangles[:, 0]]
    e1 = mesh.vertices[mesh.triangles[:, 1]] - v0
    e2 = mesh.vertices[mesh.triangles[:, 2]] - v0
    for i in range(len(a)):
        delta = b[i] - a[i]
        seg_len = float(np.linalg.norm(delta))
        if seg_len <= 2.0 * guard:
            continue
        t_lo = guard / seg_len
        out[i] = _moller_trumbore_any(v0, e1, e2, a[i], delta, t_lo, 1.0 - t_lo)
    return out


class OcclusionIndex:
    """Immutable BVH over a SceneMesh; safe for concurrent queries."""

    def __init__(self, mesh: SceneMesh, leaf_size: int = 8):
        if leaf_size < 1:
            raise ParameterError("leaf_size must be >= 1")
        self.mesh = mesh
        self.leaf_size = leaf_size
        tris = mesh.triangles
        self.n_triangles = len(tris)
        if self.n_triangles == 0:
            self.node_min = np.zeros((1, 3))
            self.node_max = np.full((1, 3), -1.0)  # inverted box: never hit
            self.node_left = np.array([-1], dtype=np.int64)
            self.node_right = np.array([0], dtype=np.int64)
            self.v0 = np.zeros((0, 3))
            self.e1 = np.zeros((0, 3))
            self.e2 = np.zeros((0, 3))
            return
        va = mesh.vertices[tris[:, 0]]
        vb = mesh.vertices[tris[:, 1]]
        vc = mesh.vertices[tris[:, 2]]
        tri_min = np.minimum(np.minimum(va, vb), vc) - _BOX_PAD
        tri_max = np.maximum(np.maximum(va, vb), vc) + _BOX_PAD
        centroids = (va + vb + vc) / 3.0

        node_min: list = []
        node_max: list = []
        node_left: list = []
        node_right: list = []
        order: list = []

        def build(idx: np.ndarray) -> int:
            me = len(node_min)
            node_min.append(tri_min[idx].min(axis=0))
            node_max.append(tri_max[idx].max(axis=0))
            node_left.append(0)
            node_right.append(0)
            if len(idx) <= self.leaf_size:
                start = len(order)
                order.extend(int(i) for i in idx)
                node_left[me] = -(start + 1)
                node_right[me] = len(order)
                return me
            cen = centroids[idx]
            axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
            perm = np.argsort(cen[:, axis], kind="stable")
            half = len(idx) // 2
            node_left[me] = build(idx[perm[:half]])
            node_right[me] = build(idx[perm[half:]])
            return me

        build(np.arange(self.n_triangles))
        self.node_min = np.ascontiguousarray(node_min, dtype=np.float64)
        self.node_max = np.ascontiguousarray(node_max, dtype=np.float64)
        self.node_left = np.asarray(node_left, dtype=np.int64)
        self.node_right = np.asarray(node_right, dtype=np.int64)
        ordered = tris[np.asarray(order, dtype=np.int64)]
        self.v0 = np.ascontiguousarray(mesh.vertices[ordered[:, 0]])
        self.e1 = np.ascontiguousarray(mesh.vertices[ordered[:, 1]] - self.v0)
        self.e2 = np.ascontiguousarray(mesh.vertices[ordered[:, 2]] - self.v0)

    def segments_hit(self, a: np.ndarray, b: np.ndarray,
                     guard: float = ENDPOINT_GUARD) -> np.ndarray:
        """Occlusion flags for a batch of segments (True = blocked)."""
        a = np.ascontiguousarray(np.atleast_2d(a), dtype=np.float64)
        b = np.ascontiguousarray(np.atleast_2d(b), dtype=np.float64)
        if a.shape != b.shape or a.shape[1] != 3:
            raise ParameterError("segment endpoints must be (n, 3) arrays")
        out = np.zeros(len(a), dtype=bool)
        if self.n_triangles == 0:
            return out
        if HAVE_NUMBA:
            _any_hit_kernel(self.node_min, self.node_max, self.node_left,
                            self.node_right, self.v0, self.e1, self.e2,
                            a, b - a, guard, out)
            return out
        return segments_hit_bruteforce(self.mesh, a, b, guard)

    def segment_clear(self, a: np.ndarray, b: np.ndarray,
                      guard: float = ENDPOINT_GUARD) -> bool:
        """True when nothing blocks the open segment between a and b."""
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if np.array_equal(a, b):
            raise ParameterError("degenerate segment: endpoints coincide")
        return not bool(self.segments_hit(a[None, :], b[None, :], guard)[0])


def build_index(mesh: SceneMesh, leaf_size: int = 8) -> OcclusionIndex:
    return OcclusionIndex(mesh, leaf_size=leaf_size)
