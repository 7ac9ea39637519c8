"""Deficit extraction and report export: where available visibility falls
short of the required distance, and the files that document it."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .io import save_plot_data, save_profile_csv, save_profile_json
from .sight import VisibilityProfile


@dataclass(frozen=True)
class DeficitSegment:
    """Maximal run of consecutive stations with available < required."""

    s_start: float
    s_end: float
    worst_gap: float
    worst_s: float


def find_deficits(profile: VisibilityProfile,
                  min_length: float = 0.0) -> list[DeficitSegment]:
    """Maximal deficit runs with worst-gap statistics.

    Equality is compliant (strict shortfall only). Stations flagged
    infeasible-braking never join a segment; they are reported separately in
    the deficits JSON. min_length optionally drops shorter segments
    (default keeps single-station segments).
    """
    if not np.all(np.isfinite(profile.available)):
        raise ParameterError("profile lacks available distances at some stations")
    missing_required = ~np.isfinite(profile.required) & ~profile.infeasible
    if np.any(missing_required):
        raise ParameterError("profile lacks required distances at some stations")
    flags = profile.deficit()
    segments: list[DeficitSegment] = []
    i = 0
    n = len(profile)
    while i < n:
        if not flags[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flags[j + 1]:
            j += 1
        gaps = profile.required[i:j + 1] - profile.available[i:j + 1]
        worst = int(np.argmax(gaps))
        seg = DeficitSegment(s_start=float(profile.s[i]),
                             s_end=float(profile.s[j]),
                             worst_gap=float(gaps[worst]),
                             worst_s=float(profile.s[i + worst]))
        if seg.s_end - seg.s_start >= min_length:
            segments.append(seg)
        i = j + 1
    return segments


def deficits_to_dict(profile: VisibilityProfile,
                     deficits: list[DeficitSegment]) -> dict:
    return {
        "segments": [{"s_start": round(d.s_start, 3),
                      "s_end": round(d.s_end, 3),
                      "worst_gap": round(d.worst_gap, 3),
                      "worst_s": round(d.worst_s, 3)} for d in deficits],
        "infeasible_stations": [round(float(s), 3)
                                for s in profile.s[profile.infeasible]],
    }


def export_report(profile: VisibilityProfile, deficits: list[DeficitSegment],
                  out_dir, figure: bool = True) -> dict[str, Path]:
    """Write the profile CSV/JSON, deficits JSON, plot data and figure.

    Returns the written paths keyed by artifact name.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "profile_csv": out_dir / "profile.csv",
        "profile_json": out_dir / "profile.json",
        "deficits_json": out_dir / "deficits.json",
        "plot_data": out_dir / "plot_data.dat",
    }
    save_profile_csv(profile, paths["profile_csv"])
    save_profile_json(profile, paths["profile_json"])
    paths["deficits_json"].write_text(
        json.dumps(deficits_to_dict(profile, deficits), indent=2,
                   sort_keys=True) + "\n", encoding="utf-8")
    save_plot_data(profile, paths["plot_data"])
    if figure:
        from .plots import save_profile_figure
        paths["figure"] = out_dir / "profile.png"
        save_profile_figure(profile, deficits, paths["figure"])
    return paths
