"""
Whitney sets and their wavelets
===============================

Layer sizes, the covering check, and how quickly wavelets from far-away
layers become numerically dependent.
"""

import numpy as np

from wmfs import circle_curve, independence_gram, normalize, square_curve, star_curve, verify_cover, whitney_layers
from wmfs.whitney import layer_count

print("points per layer at eps = 0.3:", [layer_count(0.3, l) for l in range(9)])

for curve, eps_prime in ((circle_curve(), 0.25), (square_curve(), 0.25), (star_curve(), 0.5)):
    src = whitney_layers(curve, 0.3, 0, 4)
    rep = verify_cover(src, curve, eps_prime, samples=20_000)
    print(f"{curve.name:7s} eps'={eps_prime}: covered={rep.covered}, covering constant <= {rep.covering_constant_estimate}")

star = star_curve()
for layer in (0, 3, 6):
    fam = normalize(whitney_layers(star, 0.3, layer, layer), star)
    eig = np.linalg.eigvalsh(independence_gram(fam, star))
    print(f"layer {layer}: {fam.size} wavelets, Gram eigenvalues in [{eig.min():.1e}, {eig.max():.1e}]")
