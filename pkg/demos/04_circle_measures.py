"""Measures on the circle: Fourier data, convolution, mu^inf and singularity."""

import numpy as np

from freefock import (
    AtomicMeasure,
    CantorMeasure,
    FamilyParams,
    GridMeasure,
    cantor_family,
    convolve,
    m_infinity,
    rajchman_profile,
    singularity_score,
)
from freefock.measures import haar_affinity, m_infinity_closed_form

N = 2**14

# The middle-thirds Cantor measure is not Rajchman: along n = 3^k its
# Fourier coefficients never drop below about 0.3714.
mt = CantorMeasure(0.5, 0.5, 1 / 3, (0.0, 2 / 3))
prof = rajchman_profile(mt, 3**8)
print("k   |mu^(3^k)|")
for k in range(9):
    print(f"{k}   {prof.at(3**k):.6f}")

smooth = GridMeasure.from_density(lambda t: np.exp(2 * np.cos(2 * np.pi * t)), N)
print("smooth density, tail sup at m = 40:", f"{rajchman_profile(smooth, 64).at(40):.2e}")

# Convolution multiplies Fourier coefficients.
mu = CantorMeasure(0.2, 0.05, 0.2, (0.0, 0.4, 0.8), symmetrized=True).to_grid(N)
pair = AtomicMeasure.symmetric_pair(0.1).to_grid(N)  # atoms snap to the nearest grid point
conv = convolve(mu, pair)
n = 7
print(f"\n(mu*pair)^({n})     = {conv.fourier(n).coeff(n).real:+.12f}")
print(f"mu^({n}) * pair^({n}) = {(mu.fourier(n).coeff(n) * pair.fourier(n).coeff(n)).real:+.12f}")

# mu^inf = sum 2^-m mu^{*m} has coefficients mu^/(2 - mu^) up to 2^-M.
minf = m_infinity(mu, 20, N)
c = mu.fourier(50).coeffs
err = np.max(np.abs(minf.fourier(50).coeffs - m_infinity_closed_form(c)))
print(f"max |m_inf^ - mu^/(2-mu^)| = {err:.2e}")

# A family of Cantor measures on disjoint arcs, indexed by bit strings.
p = FamilyParams(2)
fam = {x: cantor_family(x, p) for x in ("00", "01", "10", "11")}
L = p.construction_level
print(f"\npairwise scores at level {L}:", [singularity_score(fam["00"], fam[y], L) for y in ("01", "10", "11")])
for x, m in fam.items():
    print(x, "affinity to Haar:", [round(haar_affinity(m, L + s), 4) for s in range(4)])
