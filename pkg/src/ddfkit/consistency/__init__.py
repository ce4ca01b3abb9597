"""Sampling-based view-consistency checks for (xi, d) fields."""

from .checks import (
    CHECK_NAMES,
    ConstraintReport,
    Tolerances,
    VerifierReport,
    check_bc_d,
    check_bc_xi,
    check_compatibility,
    check_de_d,
    check_de_xi,
    check_io_d,
    check_io_xi,
    check_vc_inequality,
    estimate_flips,
    locate_flips,
    run_checks,
    sample_visible_rays,
    zero_membership,
)
from .corruptions import (
    AxisZeroField,
    DilatedVisibilityField,
    DirectionalHoleField,
    OneSidedField,
    SquaredDepthField,
    VisibleBlobField,
    catalogue,
)
from .pointsets import (
    PointSetEstimate,
    PointSetKind,
    directly_lit_points,
    estimate_point_sets,
    hausdorff,
    nesting_fractions,
    one_sided_distance,
)
from .scenes import induced_test_scenes

__all__ = [
    "AxisZeroField",
    "CHECK_NAMES",
    "ConstraintReport",
    "DilatedVisibilityField",
    "DirectionalHoleField",
    "OneSidedField",
    "PointSetEstimate",
    "PointSetKind",
    "SquaredDepthField",
    "Tolerances",
    "VerifierReport",
    "VisibleBlobField",
    "catalogue",
    "check_bc_d",
    "check_bc_xi",
    "check_compatibility",
    "check_de_d",
    "check_de_xi",
    "check_io_d",
    "check_io_xi",
    "check_vc_inequality",
    "directly_lit_points",
    "estimate_flips",
    "estimate_point_sets",
    "hausdorff",
    "induced_test_scenes",
    "locate_flips",
    "nesting_fractions",
    "one_sided_distance",
    "run_checks",
    "sample_visible_rays",
    "zero_membership",
]
