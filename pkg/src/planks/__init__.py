"""Constructive plank-avoidance solver for symmetric convex bodies."""

from .bang import BangInstance, bang_objective, bang_signs, reject_asymmetric_counterexample
from .errors import PlankError
from .geometry import (
    Hyperplane,
    LinearImage,
    LpBall,
    davenport_comparison,
    dual_norm,
    gauge,
    norming_functional,
    norming_point,
    sharpness_instance,
    solve_homothet,
)
from .kernel import nuclear_norm, polar_decompose, psd_sqrt, random_orthogonal
from .oracle import check_homothet, check_solution, exhaustive_signs, grid_search_2d
from .solver import PlankSystem, Solution, solve_dual, solve_equal_width, solve_general
from .symmetrize import ScalingConfig, symmetrize

__version__ = "0.1.0"
