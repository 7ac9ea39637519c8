"""Command-line front door: synth fixtures, build scenes, diagnose corridors,
serve the inspector API.

Exit codes: 0 ok, 2 usage or parameter error, 3 I/O failure, 4 internal.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from . import __version__
from .bvh import build_index
from .config import AppConfig, load_config
from .demand import required_profile
from .diagnosis import export_report, find_deficits
from .errors import EXIT_INTERNAL, EXIT_IO, EXIT_OK, RoadsightError
from .io import (load_cloud, load_mesh, load_trajectory_csv,
                 save_obj_mesh, save_ply_mesh, save_trajectory_csv,
                 save_xyz_csv)
from .pipeline import build_scene
from .sight import SightContext, SweepConfig, sweep
from .synth import gen_bend_wall, gen_crest, gen_straight
from .trajectory import estimate_geometry, resample_trajectory


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadsight",
        description="Road-corridor visibility diagnostics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate synthetic fixtures")
    synth_sub = p_synth.add_subparsers(dest="fixture", required=True)

    p_straight = synth_sub.add_parser("straight")
    p_straight.add_argument("--length", type=float, default=500.0)
    p_straight.add_argument("--width", type=float, default=7.0)
    p_straight.add_argument("--spacing", type=float, default=1.0)
    _common_synth_flags(p_straight)

    p_crest = synth_sub.add_parser("crest")
    p_crest.add_argument("--rv", type=float, default=2000.0,
                         help="vertical radius (m)")
    p_crest.add_argument("--length", type=float, default=500.0)
    p_crest.add_argument("--width", type=float, default=7.5)
    _common_synth_flags(p_crest)

    p_bend = synth_sub.add_parser("bend")
    p_bend.add_argument("--radius", type=float, default=200.0)
    p_bend.add_argument("--m", dest="offset", type=float, default=4.0,
                        help="wall lateral offset inside the curve (m)")
    p_bend.add_argument("--wall-height", type=float, default=3.0)
    p_bend.add_argument("--arc-length", type=float, default=300.0)
    p_bend.add_argument("--width", type=float, default=7.0)
    _common_synth_flags(p_bend)

    p_build = sub.add_parser("build-scene",
                             help="point cloud -> simplified scene mesh")
    p_build.add_argument("--cloud", required=True)
    p_build.add_argument("--traj", required=True)
    p_build.add_argument("--config")
    p_build.add_argument("--seed", type=int)
    p_build.add_argument("--keep-every", type=int)
    p_build.add_argument("--mesh-format", choices=("ply", "obj", "both"),
                         default="ply")
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=cmd_build_scene)

    p_diag = sub.add_parser("diagnose",
                            help="sweep visibility and report deficits")
    p_diag.add_argument("--mesh", required=True)
    p_diag.add_argument("--traj", required=True)
    p_diag.add_argument("--config", required=True,
                        help="JSON config (demand parameters required)")
    p_diag.add_argument("--mode", choices=("max", "fixed"))
    p_diag.add_argument("--step", type=float, help="target search step (m)")
    p_diag.add_argument("--station-step", type=float)
    p_diag.add_argument("--cap", type=float)
    p_diag.add_argument("--distances",
                        help="comma-separated fixed distances (m)")
    p_diag.add_argument("--no-figure", action="store_true")
    p_diag.add_argument("--out", required=True)
    p_diag.set_defaults(func=cmd_diagnose)

    p_serve = sub.add_parser("serve", help="serve profile/scene/visibility API")
    p_serve.add_argument("--mesh", required=True)
    p_serve.add_argument("--traj", required=True)
    p_serve.add_argument("--profile", required=True,
                         help="profile JSON from diagnose")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui", help="directory of built UI assets")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def _common_synth_flags(p: argparse.ArgumentParser):
    p.add_argument("--kind", choices=("mesh", "cloud"), default="mesh")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)


def _load_app_config(path: str | None) -> AppConfig:
    return load_config(path) if path else AppConfig()


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.fixture == "straight":
        scene = gen_straight(args.length, args.width, args.spacing,
                             kind=args.kind)
        params = {"length": args.length, "width": args.width,
                  "spacing": args.spacing}
    elif args.fixture == "crest":
        scene = gen_crest(args.rv, length=args.length, width=args.width,
                          kind=args.kind)
        params = {"vertical_radius": args.rv, "length": args.length,
                  "width": args.width}
    else:
        scene = gen_bend_wall(args.radius, args.offset,
                              wall_height=args.wall_height,
                              arc_length=args.arc_length, width=args.width,
                              kind=args.kind)
        params = {"radius": args.radius, "wall_offset": args.offset,
                  "wall_height": args.wall_height,
                  "arc_length": args.arc_length, "width": args.width}
    manifest = {"fixture": args.fixture, "kind": args.kind, "params": params,
                "oracle": scene.oracle, "files": {}}
    if scene.mesh is not None:
        mesh_path = out / "scene.ply"
        save_ply_mesh(scene.mesh, mesh_path)
        manifest["files"]["mesh"] = mesh_path.name
    if scene.cloud is not None:
        cloud_path = out / "cloud.csv"
        save_xyz_csv(scene.cloud, cloud_path)
        manifest["files"]["cloud"] = cloud_path.name
    traj_path = out / "trajectory.csv"
    save_trajectory_csv(scene.traj, traj_path)
    manifest["files"]["trajectory"] = traj_path.name
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    print(f"wrote {args.fixture} fixture to {out}")
    return EXIT_OK


def cmd_build_scene(args) -> int:
    cfg = _load_app_config(args.config)
    pipe = cfg.pipeline
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.keep_every is not None:
        overrides["keep_every"] = args.keep_every
    if overrides:
        from dataclasses import replace
        pipe = replace(pipe, **overrides)
    cloud = load_cloud(args.cloud)
    traj = load_trajectory_csv(args.traj)
    mesh, report = build_scene(cloud, traj, pipe)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.mesh_format in ("ply", "both"):
        save_ply_mesh(mesh, out / "scene.ply")
    if args.mesh_format in ("obj", "both"):
        save_obj_mesh(mesh, out / "scene.obj")
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    print(f"scene: {mesh.n_triangles} triangles from {len(cloud)} points "
          f"(reduction {report.reduction_factor and round(report.reduction_factor, 1)})")
    return EXIT_OK


def _sweep_config(args, cfg: AppConfig) -> SweepConfig:
    from dataclasses import replace
    sw = cfg.sweep
    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.step:
        overrides["search_step"] = args.step
    if args.station_step:
        overrides["station_step"] = args.station_step
    if args.cap:
        overrides["cap"] = args.cap
    if args.distances:
        overrides["distances"] = tuple(float(x)
                                       for x in args.distances.split(","))
    return replace(sw, **overrides) if overrides else sw


def cmd_diagnose(args) -> int:
    cfg = _load_app_config(args.config)
    sweep_cfg = _sweep_config(args, cfg)
    mesh = load_mesh(args.mesh)
    traj = load_trajectory_csv(args.traj)
    stations = resample_trajectory(traj, sweep_cfg.station_step)
    ctx = SightContext(index=build_index(mesh), traj=stations,
                       observer=sweep_cfg.observer, target=sweep_cfg.target,
                       box_density=sweep_cfg.box_density)
    profile = sweep(ctx, stations.s, sweep_cfg)
    required, infeasible = required_profile(stations, cfg.demand)
    profile = profile.with_demand(required, infeasible)
    deficits = find_deficits(profile) if sweep_cfg.mode == "max" else []
    paths = export_report(profile, deficits, args.out,
                          figure=not args.no_figure)
    n_def = len(deficits)
    print(f"diagnosed {len(profile)} stations; "
          f"{n_def} deficit segment{'s' if n_def != 1 else ''}; "
          f"report in {Path(args.out)}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .io import load_profile_json
    from .server import SceneService, make_server

    cfg = _load_app_config(args.config)
    mesh = load_mesh(args.mesh)
    traj = load_trajectory_csv(args.traj)
    if not traj.has_geometry:
        traj = estimate_geometry(traj, window=2.0 * cfg.sweep.station_step)
    profile = load_profile_json(args.profile)
    ctx = SightContext(index=build_index(mesh), traj=traj,
                       observer=cfg.sweep.observer, target=cfg.sweep.target,
                       box_density=cfg.sweep.box_density)
    ui_dir = Path(args.ui).resolve() if args.ui else None
    service = SceneService(mesh=mesh, traj=traj, ctx=ctx, profile=profile,
                           config=cfg, ui_dir=ui_dir)
    server = make_server(service, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except RoadsightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
