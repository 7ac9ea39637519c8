import json
import threading
import urllib.request
from urllib.error import HTTPError

import numpy as np
import pytest

from roadsight.bvh import build_index
from roadsight.config import AppConfig
from roadsight.io import profile_to_dict
from roadsight.server import SceneService, make_server
from roadsight.sight import SightContext, SweepConfig, sweep
from roadsight.synth import gen_crest, gen_straight


def _service(scene, config=None) -> SceneService:
    cfg = config or AppConfig()
    ctx = SightContext(index=build_index(scene.mesh), traj=scene.traj,
                       observer=cfg.sweep.observer, target=cfg.sweep.target,
                       box_density=cfg.sweep.box_density)
    profile = sweep(ctx, scene.traj.s[::4],
                    SweepConfig(search_step=10.0, cap=400.0))
    return SceneService(mesh=scene.mesh, traj=scene.traj, ctx=ctx,
                        profile=profile_to_dict(profile), config=cfg)


@pytest.fixture(scope="module")
def straight_server():
    scene = gen_straight(600.0, 7.0, 2.0)
    server = make_server(_service(scene), port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


@pytest.fixture(scope="module")
def crest_server():
    scene = gen_crest(2000.0, length=500.0)
    server = make_server(_service(scene), port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


def _get(base: str, path: str) -> dict:
    with urllib.request.urlopen(base + path, timeout=10) as resp:
        return json.loads(resp.read().decode())


class TestVisibilityEndpoint:
    def test_straight_clear(self, straight_server):
        data = _get(straight_server, "/api/visibility?s=0&d=100")
        assert data == {"in_range": True, "visible": True, "fraction": 1.0,
                        "s": 0.0, "d": 100.0}

    def test_crest_blocked_beyond_grazing(self, crest_server):
        data = _get(crest_server, "/api/visibility?s=100&d=150")
        assert data["in_range"] and not data["visible"]

    def test_out_of_range_is_200(self, straight_server):
        data = _get(straight_server, "/api/visibility?s=0&d=5000")
        assert data["in_range"] is False and data["visible"] is False
        data = _get(straight_server, "/api/visibility?s=-50&d=10")
        assert data["in_range"] is False

    def test_malformed_query_is_400_naming_field(self, straight_server):
        with pytest.raises(HTTPError) as err:
            _get(straight_server, "/api/visibility?s=abc&d=10")
        assert err.value.code == 400
        assert json.loads(err.value.read().decode())["field"] == "s"
        with pytest.raises(HTTPError) as err:
            _get(straight_server, "/api/visibility?s=0")
        assert err.value.code == 400
        assert json.loads(err.value.read().decode())["field"] == "d"


class TestSceneEndpoint:
    def test_budget_respected(self, straight_server):
        data = _get(straight_server, "/api/scene?budget=100")
        assert data["returned_triangles"] <= 100
        assert data["total_triangles"] == 2 * 300 * 3
        assert len(data["trajectory"]) > 2
        tris = np.asarray(data["triangles"])
        verts = np.asarray(data["vertices"])
        assert tris.max() < len(verts)

    def test_full_scene_when_budget_large(self, straight_server):
        data = _get(straight_server, "/api/scene?budget=1000000")
        assert data["returned_triangles"] == data["total_triangles"]

    def test_bad_budget(self, straight_server):
        with pytest.raises(HTTPError) as err:
            _get(straight_server, "/api/scene?budget=zero")
        assert err.value.code == 400


class TestProfileAndMeta:
    def test_profile_schema(self, straight_server):
        data = _get(straight_server, "/api/profile")
        assert data["stations"]
        row = data["stations"][0]
        assert {"s", "available_m", "required_m", "deficit"} <= set(row)

    def test_meta_echoes_config(self, straight_server):
        data = _get(straight_server, "/api/meta")
        assert data["cap"] == 400.0
        assert data["config"]["sweep"]["mode"] == "max"
        assert data["mesh"]["triangles"] == 2 * 300 * 3
        assert data["trajectory"]["s_max"] == 600.0

    def test_unknown_route_404(self, straight_server):
        with pytest.raises(HTTPError) as err:
            _get(straight_server, "/api/unknown")
        assert err.value.code == 404


class TestStaticAssets:
    def test_serves_ui_files(self, tmp_path):
        scene = gen_straight(100.0, 7.0, 5.0)
        (tmp_path / "index.html").write_text("<html><body>ok</body></html>")
        service = SceneService(
            mesh=scene.mesh, traj=scene.traj,
            ctx=SightContext(build_index(scene.mesh), scene.traj),
            profile={"stations": []}, config=AppConfig(), ui_dir=tmp_path)
        server = make_server(service, port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        try:
            with urllib.request.urlopen(base + "/", timeout=10) as resp:
                assert b"ok" in resp.read()
            with pytest.raises(HTTPError) as err:
                urllib.request.urlopen(base + "/../etc/passwd", timeout=10)
            assert err.value.code == 404
        finally:
            server.shutdown()
            server.server_close()

    def test_no_ui_configured_404(self, straight_server):
        with pytest.raises(HTTPError) as err:
            _get(straight_server, "/index.html")
        assert err.value.code == 404


def test_concurrent_visibility_queries(crest_server):
    results = {}

    def worker(name, s, d):
        results[name] = _get(crest_server, f"/api/visibility?s={s}&d={d}")

    threads = [threading.Thread(target=worker, args=(i, 50.0 + i, 100.0))
               for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(results) == 8
    assert all(r["visible"] for r in results.values())
