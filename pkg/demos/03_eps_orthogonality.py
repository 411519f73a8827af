"""Almost orthogonal subspaces and the constants that control them."""

import numpy as np

from freefock import (
    EpsFamily,
    delta,
    delta_iterate,
    eps_of_pair,
    eps_prime,
    family_bound_check,
    random_eps_family,
    two_projection_bound,
)

rng = np.random.default_rng(3)

print("eps    delta(eps)   eps'(eps)")
for eps in (0.01, 0.05, 0.1, 0.2, 0.3):
    print(f"{eps:.2f}   {delta(eps):.6f}    {eps_prime(eps):.6f}")

# Two subspaces tilted away from orthogonality by about eps.
K, L = random_eps_family(2, 3, 20, 0.2, rng)
m = eps_of_pair(K, L)
xi = rng.standard_normal(20)
lhs, rhs = two_projection_bound(K, L, m, xi)
print(f"\nmeasured eps = {m:.4f};  ||P_(K v L) xi||^2 = {lhs:.4f} <= {rhs:.4f}")

# A family of 8 needs delta(delta(eps)) < 1, which caps eps near 1/8.
for eps in (0.05, 0.12, 0.14):
    try:
        print(f"eps = {eps}: delta^2 = {delta_iterate(eps, 2):.4f}")
    except ValueError as exc:
        print(f"eps = {eps}: {exc}")

frames = random_eps_family(8, 2, 32, 0.08, rng)
m = max(eps_of_pair(frames[i], frames[j]) for i in range(8) for j in range(i + 1, 8))
fam = EpsFamily(tuple(frames), m)
xi = rng.standard_normal(32)
for level in (1, 2, 3):
    lhs, rhs = family_bound_check(fam, level, xi)
    print(f"level {level}: {lhs:.4f} <= {rhs:.4f}")
