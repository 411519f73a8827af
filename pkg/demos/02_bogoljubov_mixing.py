"""Free Bogoljubov actions of Z, the mixing link and the compression bound.

An orthogonal representation pi of Z on a real Hilbert space acts on the
Wick algebra letter by letter. The trace of sigma_g(W(e)) W(f) recovers the
matrix coefficient <pi(g) e, f>, so mixing of pi is visible in the algebra.
"""

import numpy as np

from freefock import (
    CrossedProductElement,
    HilbertSpec,
    OrthogonalRep,
    W,
    bogoljubov_act,
    claim_check,
    mixing_coefficient,
    sector_decompose,
    trace,
)
from freefock.sampling import random_conj_frame, random_expression, random_letter

rng = np.random.default_rng(11)
space = HilbertSpec(5)

# a rotation by an irrational angle in each of two planes, fixed fifth axis
def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

O = np.eye(5)
O[:2, :2] = rot(2 * np.pi * np.sqrt(2) / 7)
O[2:4, 2:4] = rot(2 * np.pi * np.sqrt(3) / 11)
rep = OrthogonalRep.from_real_orthogonal(space, O)

e, f = random_letter(space, rng, real=True), random_letter(space, rng, real=True)
print("  g   tau(sigma_g(W(e))W(f))   <pi(g)e, f>")
for g in (0, 1, 2, 5, 17):
    r = mixing_coefficient(rep, g, e, f)
    print(f"{g:3d}   {r.tau.real:+.12f}          {r.inner.real:+.12f}")

x = random_expression(space, rng, 3)
print("\ntrace is preserved:", abs(trace(bogoljubov_act(rep, 3, x)) - trace(x)))

# The compression of rho(g) = F(pi(g)) to K (x) Fock space is controlled by
# r * max |<pi(g) z_i, z_j>| for an orthonormal basis z of K.
K = random_conj_frame(space, 2, rng)
print("\n  g   measured   bound")
for g in (1, 3, 8):
    res = claim_check(rep, g, K, cutoff=4)
    print(f"{g:3d}   {res.measured:.6f}   {res.predicted:.6f}")

# Crossed product vectors split into the sectors used when K is small.
z = CrossedProductElement(space, {0: W(e, f), 1: W(f, e, f) + 2.0, -2: W(e)})
print("\nsector masses:", sector_decompose(z, K, rep))
