"""File formats: XYZ/PLY point clouds, PLY/OBJ meshes, trajectory and
profile tables. Parse errors carry the file and the offending line or byte
offset."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .cloud import ScanCloud
from .errors import FormatError
from .mesh import SceneMesh
from .sight import VisibilityProfile
from .trajectory import Trajectory

_PLY_DTYPES = {
    "float": "<f4", "float32": "<f4", "double": "<f8", "float64": "<f8",
    "char": "<i1", "int8": "<i1", "uchar": "<u1", "uint8": "<u1",
    "short": "<i2", "int16": "<i2", "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4", "uint": "<u4", "uint32": "<u4",
}


# ---------------------------------------------------------------- point clouds

def load_cloud(path) -> ScanCloud:
    path = Path(path)
    if path.suffix.lower() == ".ply":
        vertices, _ = load_ply(path)
        return ScanCloud(vertices)
    return load_xyz_csv(path)


def load_xyz_csv(path) -> ScanCloud:
    """ASCII x,y,z[,profile_id] rows; a leading non-numeric header is allowed."""
    path = Path(path)
    rows: list[tuple[float, float, float]] = []
    profiles: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and any(not _is_number(c) for c in row[:3]):
                continue  # header
            if len(row) not in (3, 4):
                raise FormatError(f"expected 3 or 4 columns, got {len(row)}",
                                  path=str(path), line=lineno)
            try:
                xyz = (float(row[0]), float(row[1]), float(row[2]))
                if len(row) == 4:
                    profiles.append(int(float(row[3])))
            except ValueError as exc:
                raise FormatError(f"bad numeric value: {exc}",
                                  path=str(path), line=lineno) from exc
            rows.append(xyz)
    if profiles and len(profiles) != len(rows):
        raise FormatError("profile_id column present on only some rows",
                          path=str(path))
    pts = np.asarray(rows, dtype=np.float64).reshape(-1, 3)
    return ScanCloud(pts, profile_id=np.asarray(profiles) if profiles else None)


def save_xyz_csv(cloud: ScanCloud, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if cloud.profile_id is None:
            writer.writerow(["x", "y", "z"])
            for p in cloud.xyz:
                writer.writerow([f"{v:.6f}" for v in p])
        else:
            writer.writerow(["x", "y", "z", "profile_id"])
            for p, pid in zip(cloud.xyz, cloud.profile_id):
                writer.writerow([f"{p[0]:.6f}", f"{p[1]:.6f}", f"{p[2]:.6f}",
                                 str(int(pid))])


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


# ------------------------------------------------------------------------ PLY

def load_ply(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Vertices (n,3) float64 and triangle indices (m,3) or None.

    Supports ascii and binary_little_endian 1.0 with x/y/z float or double
    vertex properties; extra scalar properties are skipped.
    """
    path = Path(path)
    blob = path.read_bytes()
    header_end = blob.find(b"end_header\n")
    if not blob.startswith(b"ply"):
        raise FormatError("not a PLY file (missing magic)", path=str(path),
                          offset=0)
    if header_end < 0:
        raise FormatError("truncated PLY header (no end_header)",
                          path=str(path), offset=len(blob))
    header = blob[:header_end].decode("ascii", errors="replace").splitlines()
    data_start = header_end + len(b"end_header\n")

    fmt = None
    elements: list[dict] = []
    offset = 0
    for line in header:
        offset += len(line) + 1
        parts = line.strip().split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] not in ("ascii", "binary_little_endian"):
                raise FormatError(f"unsupported PLY format {parts[1:]}",
                                  path=str(path), offset=offset)
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise FormatError("malformed element line", path=str(path),
                                  offset=offset)
            elements.append({"name": parts[1], "count": int(parts[2]),
                             "props": []})
        elif parts[0] == "property":
            if not elements:
                raise FormatError("property before any element",
                                  path=str(path), offset=offset)
            if parts[1] == "list":
                elements[-1]["props"].append(("list", parts[2], parts[3],
                                              parts[4]))
            else:
                if parts[1] not in _PLY_DTYPES:
                    raise FormatError(f"unsupported property type {parts[1]}",
                                      path=str(path), offset=offset)
                elements[-1]["props"].append(("scalar", parts[1], parts[2]))
    if fmt is None:
        raise FormatError("PLY header lacks a format line", path=str(path),
                          offset=header_end)

    vertices = None
    faces = None
    pos = data_start
    if fmt == "ascii":
        lines = blob[data_start:].decode("ascii", errors="replace").splitlines()
        cursor = 0
        for elem in elements:
            take = lines[cursor:cursor + elem["count"]]
            if len(take) < elem["count"]:
                raise FormatError(
                    f"element {elem['name']} truncated: expected "
                    f"{elem['count']} rows, found {len(take)}",
                    path=str(path), line=cursor + len(header) + 2)
            cursor += elem["count"]
            if elem["name"] == "vertex":
                vertices = _ascii_vertices(take, elem, path)
            elif elem["name"] == "face":
                faces = _ascii_faces(take, path, header_offset=len(header) + 1
                                     + cursor - elem["count"])
    else:
        for elem in elements:
            if elem["name"] == "vertex":
                vertices, pos = _binary_vertices(blob, pos, elem, path)
            elif elem["name"] == "face":
                faces, pos = _binary_faces(blob, pos, elem, path)
            else:
                pos = _skip_binary_element(blob, pos, elem, path)
    if vertices is None:
        raise FormatError("PLY contains no vertex element", path=str(path),
                          offset=header_end)
    return vertices, faces


def _vertex_fields(elem: dict, path: Path):
    names = []
    for prop in elem["props"]:
        if prop[0] == "list":
            raise FormatError("list property on vertex element unsupported",
                              path=str(path))
        names.append(prop[2])
    for axis in ("x", "y", "z"):
        if axis not in names:
            raise FormatError(f"vertex element lacks property {axis}",
                              path=str(path))
    return names


def _ascii_vertices(lines: list[str], elem: dict, path: Path) -> np.ndarray:
    names = _vertex_fields(elem, path)
    cols = [names.index(a) for a in ("x", "y", "z")]
    out = np.empty((len(lines), 3))
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) < len(names):
            raise FormatError(f"vertex row has {len(parts)} fields, "
                              f"expected {len(names)}", path=str(path))
        try:
            out[i] = [float(parts[c]) for c in cols]
        except ValueError as exc:
            raise FormatError(f"bad vertex value: {exc}", path=str(path)) from exc
    return out


def _ascii_faces(lines: list[str], path: Path, header_offset: int) -> np.ndarray:
    tris = []
    for i, line in enumerate(lines):
        parts = line.split()
        try:
            count = int(parts[0])
            idx = [int(p) for p in parts[1:1 + count]]
        except (ValueError, IndexError) as exc:
            raise FormatError(f"bad face row: {exc}", path=str(path),
                              line=header_offset + i + 1) from exc
        if count != 3 or len(idx) != 3:
            raise FormatError(f"non-triangular face (count={count})",
                              path=str(path), line=header_offset + i + 1)
        tris.append(idx)
    return np.asarray(tris, dtype=np.int64).reshape(-1, 3)


def _binary_vertices(blob: bytes, pos: int, elem: dict, path: Path):
    names = _vertex_fields(elem, path)
    dtype = np.dtype([(p[2], _PLY_DTYPES[p[1]]) for p in elem["props"]])
    need = dtype.itemsize * elem["count"]
    if pos + need > len(blob):
        raise FormatError(
            f"binary vertex data truncated: need {need} bytes, have "
            f"{len(blob) - pos}", path=str(path), offset=pos)
    raw = np.frombuffer(blob, dtype=dtype, count=elem["count"], offset=pos)
    out = np.column_stack([raw["x"], raw["y"], raw["z"]]).astype(np.float64)
    return out, pos + need


def _binary_faces(blob: bytes, pos: int, elem: dict, path: Path):
    props = elem["props"]
    if len(props) != 1 or props[0][0] != "list":
        raise FormatError("face element must carry a single list property",
                          path=str(path), offset=pos)
    count_dt = np.dtype(_PLY_DTYPES[props[0][1]])
    idx_dt = np.dtype(_PLY_DTYPES[props[0][2]])
    tris = np.empty((elem["count"], 3), dtype=np.int64)
    for i in range(elem["count"]):
        if pos + count_dt.itemsize > len(blob):
            raise FormatError("binary face data truncated", path=str(path),
                              offset=pos)
        n = int(np.frombuffer(blob, dtype=count_dt, count=1, offset=pos)[0])
        pos += count_dt.itemsize
        if n != 3:
            raise FormatError(f"non-triangular face (count={n})",
                              path=str(path), offset=pos)
        need = idx_dt.itemsize * 3
        if pos + need > len(blob):
            raise FormatError("binary face data truncated", path=str(path),
                              offset=pos)
        tris[i] = np.frombuffer(blob, dtype=idx_dt, count=3, offset=pos)
        pos += need
    return tris, pos


def _skip_binary_element(blob: bytes, pos: int, elem: dict, path: Path) -> int:
    for prop in elem["props"]:
        if prop[0] == "list":
            raise FormatError(f"cannot skip list element {elem['name']}",
                              path=str(path), offset=pos)
    width = sum(np.dtype(_PLY_DTYPES[p[1]]).itemsize for p in elem["props"])
    return pos + width * elem["count"]


def save_ply_mesh(mesh: SceneMesh, path, binary: bool = False) -> None:
    path = Path(path)
    header = ["ply",
              "format binary_little_endian 1.0" if binary else "format ascii 1.0",
              f"element vertex {mesh.n_vertices}",
              "property double x", "property double y", "property double z",
              f"element face {mesh.n_triangles}",
              "property list uchar int vertex_indices",
              "end_header"]
    if binary:
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode("ascii"))
            fh.write(mesh.vertices.astype("<f8").tobytes())
            face_dt = np.dtype([("n", "<u1"), ("idx", "<i4", (3,))])
            faces = np.empty(mesh.n_triangles, dtype=face_dt)
            faces["n"] = 3
            faces["idx"] = mesh.triangles.astype("<i4")
            fh.write(faces.tobytes())
        return
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(header) + "\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def save_obj_mesh(mesh: SceneMesh, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="ascii") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def load_obj_mesh(path) -> SceneMesh:
    path = Path(path)
    verts: list = []
    tris: list = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if parts[0] == "v":
                    verts.append([float(p) for p in parts[1:4]])
                elif parts[0] == "f":
                    idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                    if len(idx) != 3:
                        raise FormatError("non-triangular face",
                                          path=str(path), line=lineno)
                    tris.append(idx)
            except ValueError as exc:
                raise FormatError(f"bad OBJ value: {exc}", path=str(path),
                                  line=lineno) from exc
    return SceneMesh(np.asarray(verts, dtype=np.float64).reshape(-1, 3),
                     np.asarray(tris, dtype=np.int64).reshape(-1, 3))


def load_mesh(path) -> SceneMesh:
    path = Path(path)
    if path.suffix.lower() == ".obj":
        return load_obj_mesh(path)
    vertices, faces = load_ply(path)
    if faces is None:
        raise FormatError("PLY has no face element; not a mesh",
                          path=str(path))
    return SceneMesh(vertices, faces)


# ----------------------------------------------------------------- trajectory

TRAJ_BASE_COLUMNS = ["s", "x", "y", "z", "heading_deg"]


def load_trajectory_csv(path, lane_offset: float = 0.0) -> Trajectory:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("empty trajectory file", path=str(path), line=1)
        header = [h.strip() for h in header]
        if header[:5] != TRAJ_BASE_COLUMNS:
            raise FormatError(
                f"expected header {','.join(TRAJ_BASE_COLUMNS)}[,kappa,grade], "
                f"got {','.join(header)}", path=str(path), line=1)
        has_kappa = "kappa" in header
        has_grade = "grade" in header
        cols = {name: header.index(name) for name in header}
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < len(header):
                raise FormatError(f"row has {len(row)} fields, expected "
                                  f"{len(header)}", path=str(path), line=lineno)
            try:
                rows.append([float(row[cols[c]]) for c in header])
            except ValueError as exc:
                raise FormatError(f"bad numeric value: {exc}",
                                  path=str(path), line=lineno) from exc
    if len(rows) < 2:
        raise FormatError("trajectory needs at least 2 stations",
                          path=str(path), line=len(rows) + 1)
    data = np.asarray(rows)
    s = data[:, cols["s"]]
    xyz = data[:, [cols["x"], cols["y"], cols["z"]]]
    theta = np.radians(data[:, cols["heading_deg"]])
    heading = np.column_stack([np.cos(theta), np.sin(theta),
                               np.zeros_like(theta)])
    kappa = data[:, cols["kappa"]] if has_kappa else None
    grade = data[:, cols["grade"]] if has_grade else None
    return Trajectory(s, xyz, heading=heading, kappa=kappa, grade=grade,
                      lane_offset=lane_offset)


def save_trajectory_csv(traj: Trajectory, path) -> None:
    path = Path(path)
    with_attrs = traj.has_geometry
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(TRAJ_BASE_COLUMNS) + (["kappa", "grade"] if with_attrs else [])
        writer.writerow(header)
        for i in range(len(traj)):
            heading_deg = math.degrees(math.atan2(traj.heading[i, 1],
                                                  traj.heading[i, 0]))
            row = [f"{traj.s[i]:.6f}", f"{traj.xyz[i, 0]:.6f}",
                   f"{traj.xyz[i, 1]:.6f}", f"{traj.xyz[i, 2]:.6f}",
                   f"{heading_deg:.6f}"]
            if with_attrs:
                row += [f"{traj.kappa[i]:.9g}", f"{traj.grade[i]:.9g}"]
            writer.writerow(row)


# -------------------------------------------------------------------- profile

def _fixed_label(d: float) -> str:
    return f"vis_at_{d:g}"


def save_profile_csv(profile: VisibilityProfile, path) -> None:
    path = Path(path)
    deficit = profile.deficit()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["s", "available_m", "required_m", "deficit"]
        header += [_fixed_label(d) for d in profile.fixed_distances]
        writer.writerow(header)
        for i in range(len(profile)):
            row = [f"{profile.s[i]:.3f}",
                   "" if not np.isfinite(profile.available[i])
                   else f"{profile.available[i]:.3f}",
                   "" if not np.isfinite(profile.required[i])
                   else f"{profile.required[i]:.3f}"]
            if (np.isfinite(profile.available[i])
                    and np.isfinite(profile.required[i])
                    and not profile.infeasible[i]):
                row.append("true" if deficit[i] else "false")
            else:
                row.append("")
            row += ["true" if v else "false" for v in profile.fixed_visible[i]]
            writer.writerow(row)


def profile_to_dict(profile: VisibilityProfile) -> dict:
    deficit = profile.deficit()
    stations = []
    for i in range(len(profile)):
        entry: dict = {"s": round(float(profile.s[i]), 3)}
        entry["available_m"] = (round(float(profile.available[i]), 3)
                                if np.isfinite(profile.available[i]) else None)
        entry["required_m"] = (round(float(profile.required[i]), 3)
                               if np.isfinite(profile.required[i]) else None)
        if entry["available_m"] is None or entry["required_m"] is None \
                or profile.infeasible[i]:
            entry["deficit"] = None
        else:
            entry["deficit"] = bool(deficit[i])
        for j, d in enumerate(profile.fixed_distances):
            entry[_fixed_label(d)] = bool(profile.fixed_visible[i, j])
        stations.append(entry)
    return {"cap": profile.cap,
            "fixed_distances": list(profile.fixed_distances),
            "infeasible_stations": [round(float(s), 3) for s in
                                    profile.s[profile.infeasible]],
            "stations": stations}


def save_profile_json(profile: VisibilityProfile, path) -> None:
    Path(path).write_text(json.dumps(profile_to_dict(profile), indent=2,
                                     sort_keys=True) + "\n", encoding="utf-8")


def load_profile_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad profile JSON: {exc}", path=str(path),
                          line=exc.lineno) from exc


def save_plot_data(profile: VisibilityProfile, path) -> None:
    """Two-column blocks (s, value) per curve, gnuplot-style."""
    path = Path(path)
    blocks = []
    for name, values in (("available", profile.available),
                         ("required", profile.required)):
        lines = [f"# curve: {name}"]
        for s, v in zip(profile.s, values):
            if np.isfinite(v):
                lines.append(f"{s:.3f} {v:.3f}")
        blocks.append("\n".join(lines))
    path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")
