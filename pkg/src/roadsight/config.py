"""Single JSON configuration covering pipeline, demand and sweep parameters."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .demand import DemandParams
from .errors import FormatError, ParameterError
from .pipeline import PipelineConfig
from .sight import BoxTarget, PointPairTarget, SweepConfig
from .trajectory import ObserverSpec


@dataclass(frozen=True)
class AppConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    demand: DemandParams = field(default_factory=lambda: DemandParams(base_v85=25.0))
    sweep: SweepConfig = field(default_factory=SweepConfig)


def _check_keys(section: str, data, allowed: set[str]) -> None:
    if not isinstance(data, dict):
        raise ParameterError(f"{section} config section must be a JSON object")
    unknown = set(data) - allowed
    if unknown:
        raise ParameterError(
            f"unknown {section} config key(s): {', '.join(sorted(unknown))}")


def _target_from_dict(data: dict):
    kind = data.get("kind", "point_pair")
    if kind == "point_pair":
        _check_keys("target", data, {"kind", "lamp_height", "lamp_separation"})
        return PointPairTarget(
            lamp_height=float(data.get("lamp_height", 0.6)),
            lamp_separation=float(data.get("lamp_separation", 1.2)))
    if kind == "box":
        _check_keys("target", data, {"kind", "width", "length", "height",
                                     "visible_fraction_threshold"})
        return BoxTarget(
            width=float(data.get("width", 1.5)),
            length=float(data.get("length", 4.0)),
            height=float(data.get("height", 1.3)),
            visible_fraction_threshold=float(
                data.get("visible_fraction_threshold", 0.05)))
    raise ParameterError(f"unknown target kind {kind!r}")


def config_from_dict(data: dict) -> AppConfig:
    _check_keys("top-level", data, {"pipeline", "demand", "sweep"})

    pipe_raw = data.get("pipeline", {})
    _check_keys("pipeline", pipe_raw, {
        "keep_every", "half_width", "clearance", "dist_tol", "min_inliers",
        "connect_radius", "max_planes", "ransac_iterations", "seed",
        "region_spacing", "bpa_radius", "triangulate_leftovers"})
    pipeline = PipelineConfig(**pipe_raw)

    demand_raw = data.get("demand", {})
    _check_keys("demand", demand_raw, {
        "base_v85", "reaction_time", "friction", "gravity", "speed_law",
        "grade_speed_law"})
    demand_data = dict(demand_raw)
    try:
        for key in ("speed_law", "grade_speed_law"):
            if key in demand_data:
                demand_data[key] = tuple((float(k), float(m))
                                         for k, m in demand_data[key])
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"malformed speed-law table: {exc}") from exc
    demand_data.setdefault("base_v85", 25.0)
    demand = DemandParams(**demand_data)

    sweep_raw = data.get("sweep", {})
    _check_keys("sweep", sweep_raw, {
        "station_step", "search_step", "cap", "mode", "distances", "target",
        "observer", "box_density"})
    sweep_data = dict(sweep_raw)
    if "target" in sweep_data:
        sweep_data["target"] = _target_from_dict(sweep_data["target"])
    if "observer" in sweep_data:
        obs = sweep_data["observer"]
        _check_keys("observer", obs, {"eye_height"})
        sweep_data["observer"] = ObserverSpec(
            eye_height=float(obs.get("eye_height", 1.0)))
    if "distances" in sweep_data:
        sweep_data["distances"] = tuple(float(d) for d in sweep_data["distances"])
    sweep = SweepConfig(**sweep_data)
    return AppConfig(pipeline=pipeline, demand=demand, sweep=sweep)


def load_config(path) -> AppConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad config JSON: {exc}", path=str(path),
                          line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise FormatError("config root must be a JSON object", path=str(path))
    return config_from_dict(data)


def config_to_dict(cfg: AppConfig) -> dict:
    target = cfg.sweep.target
    if isinstance(target, PointPairTarget):
        target_d = {"kind": "point_pair", "lamp_height": target.lamp_height,
                    "lamp_separation": target.lamp_separation}
    else:
        target_d = {"kind": "box", "width": target.width,
                    "length": target.length, "height": target.height,
                    "visible_fraction_threshold": target.visible_fraction_threshold}
    return {
        "pipeline": {
            "keep_every": cfg.pipeline.keep_every,
            "half_width": cfg.pipeline.half_width,
            "clearance": cfg.pipeline.clearance,
            "dist_tol": cfg.pipeline.dist_tol,
            "min_inliers": cfg.pipeline.min_inliers,
            "connect_radius": cfg.pipeline.connect_radius,
            "max_planes": cfg.pipeline.max_planes,
            "ransac_iterations": cfg.pipeline.ransac_iterations,
            "seed": cfg.pipeline.seed,
            "region_spacing": cfg.pipeline.region_spacing,
            "bpa_radius": cfg.pipeline.bpa_radius,
            "triangulate_leftovers": cfg.pipeline.triangulate_leftovers,
        },
        "demand": {
            "base_v85": cfg.demand.base_v85,
            "reaction_time": cfg.demand.reaction_time,
            "friction": cfg.demand.friction,
            "gravity": cfg.demand.gravity,
            "speed_law": [list(k) for k in cfg.demand.speed_law],
            "grade_speed_law": [list(k) for k in cfg.demand.grade_speed_law],
        },
        "sweep": {
            "station_step": cfg.sweep.station_step,
            "search_step": cfg.sweep.search_step,
            "cap": cfg.sweep.cap,
            "mode": cfg.sweep.mode,
            "distances": list(cfg.sweep.distances),
            "target": target_d,
            "observer": {"eye_height": cfg.sweep.observer.eye_height},
            "box_density": cfg.sweep.box_density,
        },
    }
