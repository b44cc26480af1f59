"""
Classical MFS on the same singular problem
==========================================

Sources on one scaled copy r_MFS * gamma.  The error stalls and the
coefficients blow up as the number of sources grows.
"""

from wmfs import ReferenceSolution, builtin_data, error_grid, square_curve
from wmfs.experiment import solve_config, validate_config

curve = square_curve()
data = builtin_data("f2")
ref = ReferenceSolution.closed_form(data.f)

print("r_MFS    s_N   L_inf     ||d||")
for r_mfs in (1.05, 1.2, 1.5):
    for count in (25, 100, 400):
        cfg = validate_config({"curve": "square", "sources": {"mfs": {"count": count, "r_mfs": r_mfs}}, "data": "f2", "m0": 5})
        system, expansion, _ = solve_config(cfg, curve, data)
        err = error_grid(expansion, system.family, ref, curve, 200).linf_error
        print(f"{r_mfs:5.2f} {count:6d}  {err:.1e}  {expansion.coeff_norm:.1e}")
