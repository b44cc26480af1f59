"""
A boundary singularity: cone refinement
=======================================

f(z) = sqrt(z + 1 + i/10) has a branch point on the left side of the
square.  Whitney layers alone converge slowly; adding sources in a cone
opening outward from the branch point restores fast convergence.
"""

import math

from wmfs import ReferenceSolution, builtin_data, error_grid, square_curve
from wmfs.experiment import solve_config, validate_config

curve = square_curve()
data = builtin_data("f2")
ref = ReferenceSolution.closed_form(data.f)


def run(sources):
    cfg = validate_config({"curve": "square", "sources": sources, "data": "f2", "m0": 5})
    system, expansion, _ = solve_config(cfg, curve, data)
    err = error_grid(expansion, system.family, ref, curve, 300).linf_error
    return system.family.size, err, expansion.coeff_norm


print("layers only")
for last in (2, 4, 6):
    s, err, norm = run({"eps": 0.3, "layers": [0, last]})
    print(f"  s_N={s:4d}  L_inf={err:.1e}  ||d||={norm:.1e}")

print("layers 0..2 plus a cone at p (pi/3 half-angle, 7 points per level)")
for levels in (20, 40, 60, 70):
    s, err, norm = run({"eps": 0.3, "layers": [0, 2], "cones": [{"apex": [-1, -0.1], "levels": levels}]})
    print(f"  levels={levels:3d} s_N={s:4d}  L_inf={err:.1e}  ||d||={norm:.1e}")
