from .arcs import (ArcPartition, cut_angle, cut_partition, expected_rho_closed_form,
                   expected_rho_grid, rho_p_at, sorted_distance_grid)
from .regions import distinct_angles, general_position_regions, ranking_regions
from .robustness import QUARTER_PI, RhoMethod, RobustnessReport, robustness_rp
from .signature import SpatialSignature, build_signature
from .sphere import hoeffding_samples, sphere_grid_reference, sphere_mc, unit_differences

__all__ = [
    "ArcPartition", "QUARTER_PI", "RhoMethod", "RobustnessReport", "SpatialSignature",
    "build_signature", "cut_angle", "cut_partition", "distinct_angles",
    "expected_rho_closed_form", "expected_rho_grid", "general_position_regions",
    "hoeffding_samples", "ranking_regions", "rho_p_at", "robustness_rp",
    "sorted_distance_grid", "sphere_grid_reference", "sphere_mc", "unit_differences",
]
