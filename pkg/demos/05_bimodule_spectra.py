"""Measures on the 2-torus attached to the family, and what the grid can see.

For each member mu_x the measure eta_x is the pushforward of mu_x^inf x Haar
under (z1, z2) -> (z1 conj(z2), z2). Its Fourier transform sits on the
diagonal, every fiber is a rotation of mu_x^inf, and pairwise affinities of
fibers are the affinities of the mu_x^inf themselves.
"""

import numpy as np

from freefock import FamilyParams, cantor_family, disjointness_matrix, exoticness_probe
from freefock.measures import GridMeasure
from freefock.spectra import eta_from_measure

p = FamilyParams(1)
ids = ["0", "1"]
fam = [cantor_family(x, p) for x in ids]

eta = eta_from_measure(fam[0], 8)
print("eta^(m, n) for m, n in 0..3:")
print(np.round(np.abs(eta.fourier2d()[8:12, 8:12]), 6))

rep = disjointness_matrix(fam, (8, 10, 12, 14), ids=ids)
print("\nlevel   affinity(eta_0, eta_1)")
for lev, M in zip(rep.levels, rep.matrices):
    print(f"{lev:5d}   {M[0, 1]:.4f}")
# The affinity drops slowly and levels off: both mu_x^{*2} carry a component
# near 0 from X - X', which a finite Cantor construction cannot remove.

probe = exoticness_probe(eta, (6, 8, 10))
print("\nfiber probe on eta_0:", {k: probe.to_dict()[k] for k in ("atom_suspected", "exotic_consistent")})
haar = exoticness_probe(eta_from_measure(GridMeasure.haar(4096), 4, grid=4096), (6, 8, 10))
print("fiber probe on Haar:  ", {k: haar.to_dict()[k] for k in ("atom_suspected", "exotic_consistent")})
print("multiplicity:", rep.multiplicity)
