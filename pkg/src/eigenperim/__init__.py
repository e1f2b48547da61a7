"""Numerical minimization of eigenvalue-plus-perimeter shape functionals
over convex planar domains, for arbitrary norms on the plane."""

__version__ = "0.1.0"

from .functional import FunctionalValue, evaluate, isoperimetric_score, optimal_scale
from .geometry import (
    ConvexPolygon,
    SupportVector,
    convex_hull,
    hausdorff_distance,
    minkowski_sum,
    perimeter,
    polygon_from_support,
)
from .norms import (
    Norm,
    PNorm,
    Polygonal,
    Rotated,
    SumNorm,
    WeightedL1,
    additivity_on_pair,
    build_norm,
    degenerate_directions,
    is_degenerate,
    one_sided_derivatives,
    parse_norm,
    wulff_shape,
)
from .optimizer import OptimizerConfig, gradient_check, minimize_shape, uniqueness_probe
from .spectral import discretize, eigenvalue_extrapolated, principal_eigenpair

__all__ = [
    "__version__",
    "ConvexPolygon",
    "SupportVector",
    "FunctionalValue",
    "Norm",
    "PNorm",
    "WeightedL1",
    "Polygonal",
    "SumNorm",
    "Rotated",
    "OptimizerConfig",
    "build_norm",
    "parse_norm",
    "convex_hull",
    "minkowski_sum",
    "perimeter",
    "hausdorff_distance",
    "polygon_from_support",
    "one_sided_derivatives",
    "is_degenerate",
    "additivity_on_pair",
    "degenerate_directions",
    "wulff_shape",
    "discretize",
    "principal_eigenpair",
    "eigenvalue_extrapolated",
    "evaluate",
    "optimal_scale",
    "isoperimetric_score",
    "minimize_shape",
    "uniqueness_probe",
    "gradient_check",
]
