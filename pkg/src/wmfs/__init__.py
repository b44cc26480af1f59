"""Whitney-set method of fundamental solutions for the planar Neumann problem."""

from .assembly import BoundaryMesh, BoundarySystem, adapted_boundary_points, assemble, uniform_boundary_points
from .data import DataSpec, builtin_data, f1, f2, h3, u1
from .field import ErrorReport, ReferenceSolution, calibrate_u, error_grid, eval_f, eval_u
from .geometry import BoundaryCurve, circle_curve, curve_from_spec, square_curve, star_curve, tabulated_curve
from .quadrature import Segment, gauss_nodes_weights, integrate_data
from .solver import Expansion, SolveDiagnostics, coefficient_norm_sweep, min_norm_solve
from .wavelets import TraceKind, WaveletFamily, element_inner_product, independence_gram, normalize
from .whitney import CoverReport, SourceSet, cone_points, mfs_ring, verify_cover, whitney_layers

__all__ = [
    "BoundaryCurve", "BoundaryMesh", "BoundarySystem", "CoverReport", "DataSpec", "ErrorReport",
    "Expansion", "ReferenceSolution", "Segment", "SolveDiagnostics", "SourceSet", "TraceKind",
    "WaveletFamily", "adapted_boundary_points", "assemble", "builtin_data", "calibrate_u",
    "circle_curve", "coefficient_norm_sweep", "cone_points", "curve_from_spec", "element_inner_product",
    "error_grid", "eval_f", "eval_u", "f1", "f2", "gauss_nodes_weights", "h3", "independence_gram",
    "integrate_data", "mfs_ring", "min_norm_solve", "normalize", "square_curve", "star_curve",
    "tabulated_curve", "u1", "uniform_boundary_points", "verify_cover", "whitney_layers",
]
