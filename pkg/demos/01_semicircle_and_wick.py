"""Semicircular moments, Wick products and freeness on a small Fock space.

Run: python3 demos/01_semicircle_and_wick.py
"""

import math

import numpy as np

from freefock import (
    HilbertSpec,
    HVector,
    W,
    centered,
    freeness_probe,
    pairing,
    semicircle_moment,
    trace,
    vacuum_image,
    wick_apply,
    wick_product,
)

space = HilbertSpec(2)  # standard conjugation: real vectors are conj-fixed
e = HVector.basis(space, 0)
f = HVector.basis(space, 1)

# W(e) for a unit real e is a semicircular element: its even moments count
# non-crossing pairings, which are the Catalan numbers.
print("order  tau(W(e)^k)   Catalan")
for k in range(2, 13, 2):
    cat = math.comb(k, k // 2) // (k // 2 + 1)
    print(f"{k:5d}  {semicircle_moment(e, k):12.6f}  {cat:7d}")

# The product of two Wick words is again a combination of Wick words.
x, y = W(e), W(e, f)
xy = wick_product(x, y)
print("\nW(e) W(e(x)f) =", xy)
print("pairing(e, e) =", pairing(e, e))

# Products act on the vacuum the same way as operator composition.
psi = vacuum_image(W(f), 4)
gap = (wick_apply(xy, psi) - wick_apply(x, wick_apply(y, psi))).norm()
print(f"|| (xy) psi - x (y psi) || = {gap:.2e}")

# Letters e and f are orthogonal, so W(e) and W(f) are free: every
# alternating product of centered elements has zero trace.
a, b = W(e), W(f)
fams = [[centered(a**p) for p in (1, 2, 3)], [centered(b**p) for p in (1, 2, 3)]]
for pattern in ([(0, 0), (1, 0)], [(0, 1), (1, 1), (0, 0)], [(0, 2), (1, 0), (0, 1)]):
    print(f"pattern {pattern}: trace = {abs(freeness_probe(fams, pattern)):.1e}")

# A non-alternating product of the same centered element is not zero.
c = fams[0][1]
print("tau(c c) for c = W(e)^2 - 1:", np.round(trace(wick_product(c, c)).real, 12))
