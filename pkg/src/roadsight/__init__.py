"""Road-corridor visibility diagnostics.

Builds a simplified triangle mesh from mobile-mapping LIDAR clouds, sweeps a
conventional target along the trajectory to measure the available geometric
visibility distance, compares it against the speed- and grade-dependent
required distance, and reports the deficits.
"""

from .bpa import triangulate_bpa
from .bvh import OcclusionIndex, build_index, segments_hit_bruteforce
from .cloud import ScanCloud, decimate_profiles, remove_overhead
from .demand import (DemandParams, required_profile, stopping_distance,
                     v85_speed)
from .diagnosis import DeficitSegment, export_report, find_deficits
from .errors import (FormatError, InfeasibleBrakingError, IngestionError,
                     OutOfRangeError, ParameterError, RoadsightError)
from .mesh import SceneMesh
from .pipeline import PipelineConfig, PipelineReport, build_scene
from .planes import PlaneRegion, extract_planes
from .sight import (BoxTarget, PointPairTarget, SightContext, SweepConfig,
                    VisibilityProfile, box_visible_fraction,
                    max_visibility_distance, point_pair_visible, sweep,
                    target_visible_at)
from .synth import gen_bend_wall, gen_crest, gen_straight
from .trajectory import (ObserverSpec, Trajectory, TrajectoryStation,
                         estimate_geometry, place_target, resample_trajectory)

__version__ = "0.1.0"
