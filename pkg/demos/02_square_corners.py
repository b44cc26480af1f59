"""
A square: corners in the mesh
=============================

Same entire solution on the square (-1, 1)^2.  The corners are always
boundary points, so each mesh segment lies on one straight side.
"""

import numpy as np

from wmfs import ReferenceSolution, builtin_data, error_grid, square_curve
from wmfs.experiment import solve_config, validate_config

curve = square_curve()
data = builtin_data("f1")
ref = ReferenceSolution.closed_form(data.f)

for last in range(6):
    cfg = validate_config({"curve": "square", "sources": {"eps": 0.3, "layers": [0, last]}, "data": "f1", "m0": 5})
    system, expansion, diag = solve_config(cfg, curve, data)
    corner_rows = [int(np.argmin(np.abs(system.mesh.w_points - c))) for c in curve.corners]
    err = error_grid(expansion, system.family, ref, curve, 300).linf_error
    print(f"layers 0..{last}: s_N={system.family.size:4d}  L_inf={err:.1e}  corner mesh indices {corner_rows}")
