"""Conformal maps of multiply connected regions onto circular regions.

The map is built by Koebe's iteration.  Every sub-step is a simply
connected map computed from a boundary integral equation with the
generalized Neumann kernel, and values inside the region come from the
Cauchy integral formula.
"""

from .cauchy import BoundaryFunction, eval_interior, eval_with_infinity, laurent_b_c0
from .diskmap import DiskMapSolution, solve_bounded, solve_unbounded
from .geometry import GeometryError, ParamCurve, SampledCurve, sample_curve, uniform_nodes
from .gnk import GnkProblem, LinearSolverConfig, SolverError
from .koebe import (
    CircularMapSolution,
    KoebeError,
    RegionSpec,
    SolverConfig,
    circular_map,
    derivative_eval,
    forward_eval,
    inverse_eval,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryFunction",
    "CircularMapSolution",
    "DiskMapSolution",
    "GeometryError",
    "GnkProblem",
    "KoebeError",
    "LinearSolverConfig",
    "ParamCurve",
    "RegionSpec",
    "SampledCurve",
    "SolverConfig",
    "SolverError",
    "circular_map",
    "derivative_eval",
    "eval_interior",
    "eval_with_infinity",
    "forward_eval",
    "inverse_eval",
    "laurent_b_c0",
    "sample_curve",
    "solve_bounded",
    "solve_unbounded",
    "uniform_nodes",
]
