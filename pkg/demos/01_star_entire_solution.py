"""
Entire solution on a smooth star
================================

Sources in three Whitney layers around r = 3 + cos 4t, five boundary
segments per source, Neumann data of f(z) = exp(z/3 - iz/10) sin(z/3).
"""

import time

import numpy as np

from wmfs import (
    ReferenceSolution,
    adapted_boundary_points,
    assemble,
    builtin_data,
    error_grid,
    min_norm_solve,
    normalize,
    star_curve,
    whitney_layers,
)

curve = star_curve()
data = builtin_data("f1")

## Build, assemble, solve
t0 = time.perf_counter()
sources = whitney_layers(curve, eps=0.3, first_layer=0, last_layer=2)
family = normalize(sources, curve)
mesh = adapted_boundary_points(sources, curve, m0=5)
system = assemble(family, mesh, "neumann", data.g)
expansion, diag = min_norm_solve(system)
print(f"system {system.shape}, solved in {time.perf_counter() - t0:.2f}s")
print(f"residual {diag.residual_norm:.2e}, ||d|| {expansion.coeff_norm:.2e}, cond {diag.condition:.1e}")

## Error of f and of the recovered potential u
ref = ReferenceSolution.closed_form(data.f, data.u)
rep_f = error_grid(expansion, family, ref, curve, resolution=400)
rep_u = error_grid(expansion, family, ref, curve, resolution=400, quantity="u")
print(f"L_inf error in f: {rep_f.linf_error:.2e}")
print(f"L_inf error in u: {rep_u.linf_error:.2e} (additive constant {rep_u.calibration_constant:+.3e})")

## Convergence in the number of layers, and the effect of oversampling
for m0 in (1, 5):
    errs = []
    for last in range(3):
        src = whitney_layers(curve, 0.3, 0, last)
        fam = normalize(src, curve)
        sysm = assemble(fam, adapted_boundary_points(src, curve, m0), "neumann", data.g)
        exp, _ = min_norm_solve(sysm)
        errs.append(error_grid(exp, fam, ref, curve, 200).linf_error)
    print(f"M0={m0}: " + "  ".join(f"{e:.1e}" for e in errs))
