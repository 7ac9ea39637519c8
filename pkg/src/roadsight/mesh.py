"""Triangle mesh container for the reconstructed road environment."""
from __future__ import annotations

import numpy as np

from .errors import IngestionError

MIN_TRIANGLE_AREA = 1e-10


class SceneMesh:
    """Indexed triangle soup with optional per-triangle provenance labels."""

    __slots__ = ("vertices", "triangles", "provenance")

    def __init__(self, vertices, triangles, provenance=None, validate: bool = True):
        vertices = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 3)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64).reshape(-1, 3)
        if validate and triangles.size:
            if triangles.min() < 0 or triangles.max() >= len(vertices):
                raise IngestionError("triangle vertex index out of range")
            a = vertices[triangles[:, 0]]
            areas = 0.5 * np.linalg.norm(
                np.cross(vertices[triangles[:, 1]] - a,
                         vertices[triangles[:, 2]] - a), axis=1)
            same = ((triangles[:, 0] == triangles[:, 1])
                    | (triangles[:, 1] == triangles[:, 2])
                    | (triangles[:, 0] == triangles[:, 2]))
            if np.any(same):
                raise IngestionError("triangle with repeated vertices")
            if np.any(areas <= MIN_TRIANGLE_AREA):
                raise IngestionError("degenerate (near-zero area) triangle")
        if provenance is not None and len(provenance) != len(triangles):
            raise IngestionError("provenance length mismatch")
        self.vertices = vertices
        self.triangles = triangles
        self.provenance = list(provenance) if provenance is not None else None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def is_empty(self) -> bool:
        return self.n_triangles == 0

    def edge_use_counts(self) -> dict[tuple[int, int], int]:
        """Undirected edge -> number of incident triangles."""
        counts: dict[tuple[int, int], int] = {}
        for i, j, k in self.triangles:
            for u, v in ((i, j), (j, k), (k, i)):
                key = (int(min(u, v)), int(max(u, v)))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def is_edge_manifold(self) -> bool:
        """True when no undirected edge is shared by more than two triangles."""
        return all(c <= 2 for c in self.edge_use_counts().values())


def empty_mesh() -> SceneMesh:
    return SceneMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))


def merge_meshes(parts: list[tuple[SceneMesh, str]]) -> SceneMesh:
    """Concatenate meshes, offsetting indices and tagging provenance."""
    parts = [(m, tag) for m, tag in parts if not m.is_empty()]
    if not parts:
        return empty_mesh()
    verts, tris, prov = [], [], []
    offset = 0
    for m, tag in parts:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        prov.extend([tag] * m.n_triangles)
        offset += m.n_vertices
    return SceneMesh(np.vstack(verts), np.vstack(tris), provenance=prov,
                     validate=False)


def grid_mesh(points: np.ndarray, n_rows: int, n_cols: int) -> SceneMesh:
    """Triangulate a structured row-major grid of points (2 triangles per cell)."""
    idx = np.arange(n_rows * n_cols).reshape(n_rows, n_cols)
    a = idx[:-1, :-1].ravel()
    b = idx[:-1, 1:].ravel()
    c = idx[1:, :-1].ravel()
    d = idx[1:, 1:].ravel()
    tris = np.concatenate([np.column_stack([a, b, d]),
                           np.column_stack([a, d, c])])
    return SceneMesh(points, tris, validate=False)
