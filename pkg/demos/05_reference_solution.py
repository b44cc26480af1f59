"""
Unknown solution: error against a reference expansion
=====================================================

Data g = Re(nu h) - c from a non-analytic field h, with c making the mean
zero.  No closed form exists, so a large run (9 layers plus corner cones)
serves as the reference for smaller ones.
"""

import math

from wmfs import square_curve
from wmfs.data import builtin_data
from wmfs.experiment import build_reference, solve_config, validate_config
from wmfs.field import error_grid

curve = square_curve()
data = builtin_data("g3", curve)
print(f"mean-zero constant c = {data.constant:.12f}")

cone = {"eps": 0.6, "half_angle": math.pi / 4}
base = {
    "curve": "square",
    "data": "g3",
    "m0": 5,
    "reference": {"sources": {"eps": 0.3, "layers": [0, 8], "corner_cones": {**cone, "levels": 50}}},
}
cfg = validate_config({**base, "sources": {"eps": 0.3, "layers": [0, 2], "corner_cones": {**cone, "levels": 10}}})
reference = build_reference(cfg, curve, data)
print(f"reference uses {reference.family.size} sources")

for levels in (5, 15, 25, 34):
    cfg["sources"]["corner_cones"]["levels"] = levels
    system, expansion, _ = solve_config(cfg, curve, data)
    err = error_grid(expansion, system.family, reference, curve, 200).linf_error
    print(f"s_N={system.family.size:4d}  estimated L_inf={err:.1e}")
