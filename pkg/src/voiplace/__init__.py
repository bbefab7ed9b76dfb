"""Fast oriented volume-of-interest search in 3D binary tumor masks.

Precomputed 3D summed-area tables make every box sum a constant-time
lookup, which turns the exhaustive 3D offset scan from minutes into
seconds, and a leaky, per-axis search metric keeps found regions
cube-like and rewards tumor fractions above the target.
"""

from .bench import BenchReport, BenchRow, run_bench
from .estimator import RegionSearch
from .integral import SummedAreaTable3D, build_sat, region_sum, region_sum_bruteforce
from .metrics import (
    ConventionalParams,
    ProposedParams,
    RegionEval,
    conventional_cost,
    conventional_score,
    evaluate_region,
    leaky,
    proposed_cost,
    region_cost,
)
from .phantom import Box, Ellipsoid, PhantomSpec, make_phantom, sphere_phantom
from .rotation import canonical_angles, rotate_labels, rotation_matrix
from .search import (
    ConfigError,
    RegionParams,
    SearchConfig,
    SearchResult,
    optimize_offset_full3d,
    optimize_offset_line1d,
    region_to_world,
    search_region,
)
from .volume import (
    EmptyMaskError,
    LabelVolume,
    VolumeHeader,
    as_label_volume,
    binarize,
    centroid,
    load_volume,
    read_header,
    save_volume,
    total_tumor,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "BenchRow",
    "Box",
    "ConfigError",
    "ConventionalParams",
    "Ellipsoid",
    "EmptyMaskError",
    "LabelVolume",
    "PhantomSpec",
    "ProposedParams",
    "RegionEval",
    "RegionParams",
    "RegionSearch",
    "SearchConfig",
    "SearchResult",
    "SummedAreaTable3D",
    "VolumeHeader",
    "as_label_volume",
    "binarize",
    "build_sat",
    "canonical_angles",
    "centroid",
    "conventional_cost",
    "conventional_score",
    "evaluate_region",
    "leaky",
    "load_volume",
    "make_phantom",
    "optimize_offset_full3d",
    "optimize_offset_line1d",
    "proposed_cost",
    "read_header",
    "region_cost",
    "region_sum",
    "region_sum_bruteforce",
    "region_to_world",
    "rotate_labels",
    "rotation_matrix",
    "run_bench",
    "save_volume",
    "search_region",
    "sphere_phantom",
    "total_tumor",
]
