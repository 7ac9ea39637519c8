"""Report figures: required vs available visibility along the corridor."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sight import VisibilityProfile


def plot_profile(profile: VisibilityProfile, deficits=(), ax=None):
    """Both curves against the curvilinear abscissa, deficits shaded."""
    if ax is None:
        _, ax = plt.subplots(figsize=(9, 4))
    if profile.has_available:
        ax.plot(profile.s, profile.available, color="magenta", lw=1.4,
                label="available")
    if profile.has_required:
        ax.plot(profile.s, profile.required, color="black", lw=1.4,
                label="required")
    for seg in deficits:
        ax.axvspan(seg.s_start, seg.s_end, color="red", alpha=0.18, lw=0)
    if np.any(profile.infeasible):
        for s in profile.s[profile.infeasible]:
            ax.axvline(s, color="orange", alpha=0.5, lw=0.8)
    ax.axhline(profile.cap, color="gray", ls="--", lw=0.8, alpha=0.6)
    ax.set_xlabel("curvilinear abscissa s (m)")
    ax.set_ylabel("visibility distance (m)")
    ax.set_ylim(bottom=0)
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.25)
    return ax


def save_profile_figure(profile: VisibilityProfile, deficits, path,
                        dpi: int = 120) -> None:
    ax = plot_profile(profile, deficits)
    fig = ax.figure
    fig.tight_layout()
    fig.savefig(path, dpi=dpi, metadata={"Software": "roadsight"})
    plt.close(fig)
