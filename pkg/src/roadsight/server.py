"""Read-only HTTP layer for the inspection UI.

Serves the computed profile, a triangle-budgeted view of the scene mesh,
on-demand visibility queries, a config echo, and the static UI assets. All
state is loaded once and never mutated, so concurrent requests are safe.
"""
from __future__ import annotations

import json
import mimetypes
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from .config import AppConfig, config_to_dict
from .mesh import SceneMesh
from .sight import SightContext, target_query
from .trajectory import Trajectory

DEFAULT_SCENE_BUDGET = 50_000


@dataclass(frozen=True)
class SceneService:
    """Pre-loaded artifacts behind the API."""

    mesh: SceneMesh
    traj: Trajectory
    ctx: SightContext
    profile: dict
    config: AppConfig
    ui_dir: Path | None = None

    def meta(self) -> dict:
        return {
            "config": config_to_dict(self.config),
            "mesh": {"vertices": self.mesh.n_vertices,
                     "triangles": self.mesh.n_triangles},
            "trajectory": {"s_min": self.traj.s_start,
                           "s_max": self.traj.s_end,
                           "stations": len(self.traj)},
            "cap": self.config.sweep.cap,
        }

    def scene_payload(self, budget: int) -> dict:
        tris = self.mesh.triangles
        total = len(tris)
        if total > budget > 0:
            pick = np.unique(np.linspace(0, total - 1, budget).astype(np.int64))
            tris = tris[pick]
        used = np.unique(tris)
        remap = np.full(self.mesh.n_vertices, -1, dtype=np.int64)
        remap[used] = np.arange(used.size)
        verts = self.mesh.vertices[used]
        return {
            "vertices": [[round(float(c), 4) for c in v] for v in verts],
            "triangles": remap[tris].tolist(),
            "trajectory": [[round(float(c), 4) for c in p]
                           for p in self.traj.xyz],
            "total_triangles": total,
            "returned_triangles": len(tris),
        }

    def visibility_payload(self, s: float, d: float) -> dict:
        if not self.traj.in_range(s):
            return {"in_range": False, "visible": False, "fraction": 0.0,
                    "s": s, "d": d}
        q = target_query(self.ctx, s, d)
        return {"in_range": q.in_range, "visible": q.visible,
                "fraction": round(q.fraction, 6), "s": s, "d": d}


class _Handler(BaseHTTPRequestHandler):
    service: SceneService = None  # injected by make_server

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, payload: dict, status: int = 200):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _bad_request(self, field: str, message: str):
        self._send_json({"error": message, "field": field}, status=400)

    def _query_float(self, qs: dict, name: str) -> float:
        raw = qs.get(name)
        if not raw:
            raise KeyError(name)
        return float(raw[0])

    def do_GET(self):  # noqa: N802 (http.server API)
        url = urlparse(self.path)
        qs = parse_qs(url.query)
        route = url.path.rstrip("/") or "/"
        svc = self.service
        if route == "/api/profile":
            self._send_json(svc.profile)
        elif route == "/api/meta":
            self._send_json(svc.meta())
        elif route == "/api/scene":
            try:
                budget = int(qs.get("budget", [DEFAULT_SCENE_BUDGET])[0])
            except ValueError:
                return self._bad_request("budget", "budget must be an integer")
            if budget < 1:
                return self._bad_request("budget", "budget must be >= 1")
            self._send_json(svc.scene_payload(budget))
        elif route == "/api/visibility":
            try:
                s = self._query_float(qs, "s")
            except KeyError:
                return self._bad_request("s", "missing query parameter s")
            except ValueError:
                return self._bad_request("s", "s must be a number")
            try:
                d = self._query_float(qs, "d")
            except KeyError:
                return self._bad_request("d", "missing query parameter d")
            except ValueError:
                return self._bad_request("d", "d must be a number")
            if d <= 0:
                return self._bad_request("d", "d must be > 0")
            self._send_json(svc.visibility_payload(s, d))
        else:
            self._serve_static(url.path)

    def _serve_static(self, path: str):
        root = self.service.ui_dir
        if root is None:
            return self._send_json({"error": "no UI assets configured"},
                                   status=404)
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        try:
            target.relative_to(root.resolve())
        except ValueError:
            return self._send_json({"error": "path outside UI root"},
                                   status=404)
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return self._send_json({"error": f"no such asset {rel}"},
                                   status=404)
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(service: SceneService, host: str = "127.0.0.1",
                port: int = 8080) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
