"""Reference computations that avoid the package's own algorithms.

The dense Fock model builds creation operators as explicit matrices and takes
annihilation to be their conjugate transpose, so it checks the sparse
implementation and the Wick recursion from outside.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import mpmath as mp
import numpy as np


# ---- combinatorics --------------------------------------------------------------


def _pairings(points):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1 :]
        for p in _pairings(rest):
            yield [(a, points[i])] + p


def _crosses(p, q):
    (a, b), (c, d) = sorted(p), sorted(q)
    return a < c < b < d or c < a < d < b


def count_noncrossing_pairings(n: int) -> int:
    """Brute force: enumerate all pairings of n points and keep the non-crossing ones."""
    if n % 2:
        return 0
    return sum(
        1
        for P in _pairings(list(range(n)))
        if not any(_crosses(p, q) for p, q in itertools.combinations(P, 2))
    )


def semicircle_integral(p: int, dps: int = 30) -> float:
    with mp.workdps(dps):
        return float(mp.quad(lambda x: x**p * mp.sqrt(4 - x**2) / (2 * mp.pi), [-2, 0, 2]))


def delta_mp(eps: str, dps: int = 50) -> float:
    with mp.workdps(dps):
        e = mp.mpf(eps)
        return float(2 * e / mp.sqrt(1 - e - mp.sqrt(2) * e * mp.sqrt(1 - e)))


def eps_prime_mp(eps: str, dps: int = 50) -> float:
    with mp.workdps(dps):
        e = mp.mpf(eps)
        return float(mp.sqrt(2) * e / mp.sqrt(1 - e))


def middle_thirds_abs(n: int, terms: int = 80) -> float:
    """|mu^(n)| for the middle-thirds measure: prod_j |cos(2 pi n 3^-j)|."""
    with mp.workdps(40):
        return float(mp.fprod(abs(mp.cos(2 * mp.pi * n / mp.mpf(3) ** j)) for j in range(1, terms)))


# ---- dense Fock model -----------------------------------------------------------


@lru_cache(maxsize=None)
def fock_index(d: int, L: int):
    words = [()]
    for n in range(1, L + 1):
        words += list(itertools.product(range(d), repeat=n))
    return words, {w: i for i, w in enumerate(words)}


def dense_creation(e: np.ndarray, L: int) -> np.ndarray:
    d = e.size
    words, idx = fock_index(d, L)
    M = np.zeros((len(words), len(words)), complex)
    for w in words:
        if len(w) == L:
            continue
        for i in range(d):
            M[idx[(i,) + w], idx[w]] += e[i]
    return M


def dense_conj(e: np.ndarray, perm) -> np.ndarray:
    return np.conj(e[np.asarray(perm)])


def dense_wick(expr, L: int) -> np.ndarray:
    """Operator of a WickExpression on the dense model, from the defining creation formula."""
    d = expr.space.dim
    words, _ = fock_index(d, L)
    perm = expr.space.conj_perm
    M = expr.scalar * np.eye(len(words), dtype=complex)
    for c, w in expr.terms:
        es = [e.coeffs for e in w.letters]
        n = len(es)
        for k in range(n + 1):
            T = np.eye(len(words), dtype=complex)
            for j in range(k):
                T = T @ dense_creation(es[j], L)
            for j in range(k, n):
                T = T @ dense_creation(dense_conj(es[j], perm), L).conj().T
            M = M + c * T

    return M


def to_dense(psi, L: int | None = None) -> np.ndarray:
    L = psi.cutoff if L is None else L
    words, idx = fock_index(psi.space.dim, L)
    v = np.zeros(len(words), complex)
    for w, c in psi.coeffs.items():
        v[idx[w]] = c
    return v


def vacuum_dense(d: int, L: int) -> np.ndarray:
    words, _ = fock_index(d, L)
    v = np.zeros(len(words), complex)
    v[0] = 1
    return v


# ---- claim ------------------------------------------------------------------------


def dense_claim_norm(U: np.ndarray, Z: np.ndarray, L: int) -> float:
    """|| P rho P || on the span of words of length 1..L, with explicit projector and second quantization."""
    d = U.shape[0]
    PK = Z @ Z.conj().T
    best = 0.0
    for n in range(1, L + 1):
        P = PK
        R = U
        for _ in range(n - 1):
            P = np.kron(P, np.eye(d))
            R = np.kron(R, U)
        best = max(best, float(np.linalg.norm(P @ R @ P, 2)))
    return best


# ---- measures ---------------------------------------------------------------------


def minf_partial_sum(c: np.ndarray, M: int) -> np.ndarray:
    acc = np.zeros_like(c, dtype=complex)
    for m in range(1, M + 1):
        acc += c**m / 2.0**m
    return acc / (1 - 2.0**-M)


def mc_eta_coeff(weights: np.ndarray, m: int, n: int, samples: int, rng: np.random.Generator):
    """Monte Carlo estimate of int (z1 conj z2)^m z2^n d(mu x Haar) and its standard error."""
    N = weights.size
    s = rng.choice(N, size=samples, p=weights) / N
    t = rng.random(samples)
    vals = np.exp(2j * np.pi * (m * (s - t) + n * t))
    return vals.mean(), vals.std(ddof=1) / np.sqrt(samples)


def direct_circular_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    N = a.size
    out = np.zeros(N)
    for k in np.flatnonzero(a):
        out += a[k] * np.roll(b, k)
    return out
