"""Seeded random instances shared by the CLI experiments and the tests."""

from __future__ import annotations

import numpy as np

from .fock import HilbertSpec, HVector
from .subspaces import SubspaceFrame
from .wick import WickExpression


def random_space(dim: int, rng: np.random.Generator) -> HilbertSpec:
    """A conjugation that swaps a random number of disjoint coordinate pairs."""
    perm = list(range(dim))
    order = rng.permutation(dim)
    pairs = int(rng.integers(0, dim // 2 + 1))
    for p in range(pairs):
        i, j = int(order[2 * p]), int(order[2 * p + 1])
        perm[i], perm[j] = j, i
    return HilbertSpec(dim, tuple(perm))


def random_letter(space: HilbertSpec, rng: np.random.Generator, real: bool = False) -> HVector:
    if real:
        return HVector(space, space.real_basis() @ rng.standard_normal(space.dim))
    return HVector(space, rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim))


def random_expression(space: HilbertSpec, rng: np.random.Generator, max_degree: int = 3, n_terms: int = 3) -> WickExpression:
    terms = []
    for _ in range(n_terms):
        n = int(rng.integers(1, max_degree + 1))
        c = complex(rng.standard_normal(), rng.standard_normal())
        terms.append((c, [random_letter(space, rng) for _ in range(n)]))
    return WickExpression(space, complex(rng.standard_normal(), rng.standard_normal()), terms)


def random_conj_frame(space: HilbertSpec, rank: int, rng: np.random.Generator) -> SubspaceFrame:
    """Span of ``rank`` random conj-fixed vectors, hence a conj-invariant subspace."""
    V = space.real_basis() @ rng.standard_normal((space.dim, rank))
    return SubspaceFrame.span(V)
