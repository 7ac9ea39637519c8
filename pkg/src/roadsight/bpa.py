"""Ball-pivoting surface reconstruction.

A ball of fixed radius rests on three points (its interior empty of other
points) to seed a triangle, then pivots around each boundary edge to the
first point it touches, growing an edge-manifold triangulation. Orientation
is propagated across shared edges, and no undirected edge ever joins more
than two triangles.
"""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError
from .mesh import SceneMesh, empty_mesh

_REL_TOL = 1e-9


def _circumcircle(a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Circumcenter and squared circumradius of a 3D triangle, or None."""
    ab = b - a
    ac = c - a
    n = np.cross(ab, ac)
    n2 = float(n @ n)
    scale = max(float(ab @ ab), float(ac @ ac))
    if n2 <= (1e-14 * scale) ** 2 or scale == 0.0:
        return None
    cc = a + (float(ac @ ac) * np.cross(n, ab) + float(ab @ ab) * np.cross(ac, n)) / (2.0 * n2)
    r2 = float((cc - a) @ (cc - a))
    return cc, r2, n / np.sqrt(n2)


def _ball_centers(a, b, c, radius):
    """Centers of the two radius-balls touching all three points (may coincide)."""
    cir = _circumcircle(a, b, c)
    if cir is None:
        return []
    cc, r2, normal = cir
    h2 = radius * radius - r2
    if h2 < -(_REL_TOL * radius * radius):
        return []
    h = np.sqrt(max(h2, 0.0))
    if h == 0.0:
        return [cc]
    return [cc + h * normal, cc - h * normal]


class _Builder:
    def __init__(self, points: np.ndarray, radius: float):
        self.pts = points
        self.radius = radius
        self.inner = radius * (1.0 - _REL_TOL) - 1e-12
        self.tree = cKDTree(points)
        self.used = np.zeros(len(points), dtype=bool)
        self.edge_count: dict[tuple[int, int], int] = {}
        self.triangles: list[tuple[int, int, int]] = []
        self.tri_keys: set[tuple[int, int, int]] = set()
        self.front: deque = deque()

    def ball_is_empty(self, center: np.ndarray, touching: tuple[int, ...]) -> bool:
        inside = self.tree.query_ball_point(center, self.inner)
        return all(i in touching for i in inside)

    def _edge_key(self, u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def _add_triangle(self, a: int, b: int, c: int, center: np.ndarray):
        key = tuple(sorted((a, b, c)))
        self.tri_keys.add(key)
        self.triangles.append((a, b, c))
        for u, v, o in ((a, b, c), (b, c, a), (c, a, b)):
            ek = self._edge_key(u, v)
            n = self.edge_count.get(ek, 0) + 1
            self.edge_count[ek] = n
            if n == 1:
                self.front.append((u, v, o, center))
        self.used[[a, b, c]] = True

    def _try_seed(self, i: int) -> bool:
        neighbors = self.tree.query_ball_point(self.pts[i], 2.0 * self.radius)
        cand = [j for j in neighbors if j != i and not self.used[j]]
        if len(cand) < 2:
            return False
        d = np.linalg.norm(self.pts[cand] - self.pts[i], axis=1)
        order = sorted(range(len(cand)), key=lambda t: (d[t], cand[t]))
        cand = [cand[t] for t in order]
        for x in range(len(cand)):
            for y in range(x + 1, len(cand)):
                j, k = cand[x], cand[y]
                for center in _ball_centers(self.pts[i], self.pts[j], self.pts[k],
                                            self.radius):
                    if self.ball_is_empty(center, (i, j, k)):
                        self._add_triangle(i, j, k, center)
                        return True
        return False

    def _pivot(self, u: int, v: int, o: int, center: np.ndarray):
        """Roll the ball around edge (u, v), away from opposite vertex o."""
        pu, pv, po = self.pts[u], self.pts[v], self.pts[o]
        mid = 0.5 * (pu + pv)
        axis = pv - pu
        axis_len = np.linalg.norm(axis)
        if axis_len < 1e-15:
            return None
        axis = axis / axis_len

        def radial(p):
            r = p - mid
            return r - (r @ axis) * axis

        r0 = radial(center)
        r0n = np.linalg.norm(r0)
        if r0n < 1e-15:
            return None
        uhat = r0 / r0n
        what = np.cross(axis, uhat)
        ro = radial(po)
        ron = np.linalg.norm(ro)
        if ron < 1e-15:
            return None
        if float(ro @ what) > 0.0:
            what = -what  # keep the existing triangle on the negative side
        phi_o = float(np.arctan2(ro @ what, ro @ uhat))

        neighbors = self.tree.query_ball_point(mid, 2.0 * self.radius)
        best = None
        for k in sorted(neighbors):
            if k == u or k == v or k == o:
                continue
            if tuple(sorted((u, v, k))) in self.tri_keys:
                continue
            # the two side edges must stay manifold
            if self.edge_count.get(self._edge_key(u, k), 0) >= 2:
                continue
            if self.edge_count.get(self._edge_key(k, v), 0) >= 2:
                continue
            rk = radial(self.pts[k])
            rkn = np.linalg.norm(rk)
            if rkn > 1e-15:
                # a candidate on the same radial ray as the opposite vertex
                # would overlap the existing triangle (cospherical grids)
                phi_k = float(np.arctan2(rk @ what, rk @ uhat))
                delta = np.arctan2(np.sin(phi_k - phi_o), np.cos(phi_k - phi_o))
                if abs(delta) < 1e-7:
                    continue
            for cnt in _ball_centers(pu, pv, self.pts[k], self.radius):
                if not self.ball_is_empty(cnt, (u, v, k)):
                    continue
                rc = radial(cnt)
                theta = float(np.arctan2(rc @ what, rc @ uhat))
                if theta < -1e-9:
                    theta += 2.0 * np.pi
                elif theta < 0.0:
                    theta = 0.0
                # rolling past half a turn would leave the open surface and
                # tile its underside
                if theta > np.pi + 1e-9:
                    continue
                if best is None or (theta, k) < (best[0], best[1]):
                    best = (theta, k, cnt)
        return best

    def run(self) -> SceneMesh:
        n = len(self.pts)
        seed_at = 0
        while True:
            while self.front:
                u, v, o, center = self.front.popleft()
                if self.edge_count.get(self._edge_key(u, v), 0) >= 2:
                    continue  # closed from the other side meanwhile
                hit = self._pivot(u, v, o, center)
                if hit is None:
                    continue  # boundary edge
                _, k, cnt = hit
                self._add_triangle(v, u, k, cnt)
            while seed_at < n and self.used[seed_at]:
                seed_at += 1
            if seed_at >= n:
                break
            if not self._try_seed(seed_at):
                seed_at += 1
        if not self.triangles:
            return empty_mesh()
        tris = np.array(self.triangles, dtype=np.int64)
        keep = np.unique(tris)
        remap = np.full(n, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        return SceneMesh(self.pts[keep], remap[tris], validate=False)


def triangulate_bpa(points: np.ndarray, ball_radius: float) -> SceneMesh:
    """Reconstruct a triangle mesh from points with a fixed pivoting radius.

    Fewer than three points yield an empty mesh; so does a cloud whose points
    are pairwise farther apart than the ball diameter.
    """
    if ball_radius <= 0:
        raise ParameterError(f"ball_radius must be > 0, got {ball_radius}")
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    if len(points) < 3:
        return empty_mesh()
    return _Builder(points, float(ball_radius)).run()
