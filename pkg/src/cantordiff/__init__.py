"""Exact analysis of arithmetic differences of middle Cantor sets.

The package synthesizes the contraction system whose attractor is
C_alpha - lam*C_beta, decides full-interval equality in closed form, runs
orbit-based membership in the plane of relative configurations, certifies
finite type and computes Hausdorff dimension through a neighbor automaton,
builds recurrent sets under the thickness condition, and emits interval
certificates for nonlinear images.  All decisions run on exact rational or
real-quadratic-field arithmetic; floats appear only in reporting enclosures.
"""

from .scalars import FieldSpec, GOLDEN, Scalar, common_denominator, parse_field, parse_scalar
from .intervals import Interval, IntervalSet
from .cantor import (
    CantorPair,
    HomogeneousCantor,
    MiddleCantor,
    hausdorff_dim,
    in_omega,
    log_ratio,
    middle_pair,
    thickness,
    thickness_product,
)
from .ifs import (
    CoverageReport,
    LineIFS,
    LineMap,
    attractor_membership,
    coverage_at_depth,
    generate_ifs,
    generate_ifs_homogeneous,
    measure_zero_by_count,
    scaled_lambda_pair,
    sum_as_difference,
)

__all__ = [
    "FieldSpec",
    "GOLDEN",
    "Scalar",
    "common_denominator",
    "parse_field",
    "parse_scalar",
    "Interval",
    "IntervalSet",
    "CantorPair",
    "HomogeneousCantor",
    "MiddleCantor",
    "middle_pair",
    "thickness",
    "thickness_product",
    "hausdorff_dim",
    "in_omega",
    "log_ratio",
    "LineIFS",
    "LineMap",
    "CoverageReport",
    "generate_ifs",
    "generate_ifs_homogeneous",
    "coverage_at_depth",
    "attractor_membership",
    "measure_zero_by_count",
    "scaled_lambda_pair",
    "sum_as_difference",
]

__version__ = "0.1.0"
