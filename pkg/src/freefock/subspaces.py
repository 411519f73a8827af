"""epsilon-orthogonality of subspaces and the projection inequalities built on it.

Subspaces are carried as orthonormal frames (columns). ``K perp_eps L`` holds
iff the largest singular value of ``frame(K)^* frame(L)`` is at most eps,
i.e. iff ||p q|| <= eps for the orthogonal projections p, q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

RANK_RTOL = 1e-8
SLACK = 1e-9


class AdmissibilityError(ValueError):
    """An inequality's hypotheses are not met by the measured data."""


@dataclass(frozen=True, eq=False)
class SubspaceFrame:
    frame: np.ndarray

    def __post_init__(self):
        F = np.array(self.frame, dtype=complex)
        if F.ndim == 1:
            F = F[:, None]
        if F.ndim != 2:
            raise ValueError("frame must be a 2-d array of column vectors")
        if F.shape[1]:
            G = F.conj().T @ F
            err = np.max(np.abs(G - np.eye(F.shape[1])))
            if err > 1e-10:
                raise ValueError(f"frame columns are not orthonormal (max Gram error {err:.2e})")
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @classmethod
    def span(cls, vectors: np.ndarray, rtol: float = RANK_RTOL) -> SubspaceFrame:
        """Orthonormal frame for the column span of ``vectors``."""
        V = np.asarray(vectors, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        if V.shape[1] == 0:
            return cls(np.zeros((V.shape[0], 0), complex))
        U, s, _ = np.linalg.svd(V, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            return cls(np.zeros((V.shape[0], 0), complex))
        rank = int(np.sum(s > rtol * s[0]))
        return cls(U[:, :rank])

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def project(self, xi: np.ndarray) -> np.ndarray:
        return self.frame @ (self.frame.conj().T @ xi)

    def complement(self) -> SubspaceFrame:
        n, r = self.frame.shape
        if r == 0:
            return SubspaceFrame(np.eye(n, dtype=complex))
        Q, _ = np.linalg.qr(np.hstack([self.frame, np.eye(n)]))
        return SubspaceFrame(Q[:, r:n])

    def transform(self, U: np.ndarray) -> SubspaceFrame:
        """Image under a unitary."""
        return SubspaceFrame(U @ self.frame)


def _check_ambient(frames: Sequence[SubspaceFrame]):
    dims = {K.ambient_dim for K in frames}
    if len(dims) > 1:
        raise ValueError(f"ambient dimension mismatch: {sorted(dims)}")


def eps_of_pair(K: SubspaceFrame, L: SubspaceFrame) -> float:
    """Smallest eps with K perp_eps L; symmetric bit-for-bit."""
    _check_ambient([K, L])
    if K.rank == 0 or L.rank == 0:
        return 0.0
    # canonical operand order makes eps(K, L) == eps(L, K) exactly
    if (K.frame.shape, K.frame.tobytes()) > (L.frame.shape, L.frame.tobytes()):
        K, L = L, K
    return float(np.linalg.svd(K.frame.conj().T @ L.frame, compute_uv=False)[0])


def join(subspaces: Sequence[SubspaceFrame], rtol: float = RANK_RTOL) -> SubspaceFrame:
    """Frame for the closed span K_1 v ... v K_m.

    Singular values below ``rtol`` times the largest are treated as zero.
    """
    if not subspaces:
        raise ValueError("join of an empty list")
    _check_ambient(subspaces)
    return SubspaceFrame.span(np.hstack([K.frame for K in subspaces]), rtol=rtol)


def delta(eps: float) -> float:
    """2 eps / sqrt(1 - eps - sqrt(2) eps sqrt(1 - eps)) on [0, 1/2)."""
    if not 0 <= eps < 0.5:
        raise AdmissibilityError(f"delta is defined on [0, 1/2), got {eps}")
    return 2 * eps / math.sqrt(1 - eps - math.sqrt(2) * eps * math.sqrt(1 - eps))


def eps_prime(eps: float) -> float:
    """sqrt(2) eps / sqrt(1 - eps): bound for (q1 v q2) against q3."""
    if not 0 <= eps < 1:
        raise AdmissibilityError(f"eps' needs 0 <= eps < 1, got {eps}")
    return math.sqrt(2) * eps / math.sqrt(1 - eps)


def delta_iterate(eps: float, j: int) -> float:
    """j-fold composition of :func:`delta`; the last iterate must stay below 1."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if not 0 <= eps < 1:
        raise AdmissibilityError(f"eps must lie in [0, 1), got {eps}")
    x = eps
    for step in range(1, j + 1):
        if x >= 0.5:
            raise AdmissibilityError(f"iterate {step - 1} equals {x:.6g} >= 1/2; delta cannot be applied at step {step}")
        x = delta(x)
    if x >= 1:
        raise AdmissibilityError(f"iterate {j} equals {x:.6g} >= 1")
    return x


def family_factor(eps: float, level: int) -> float:
    """prod_{j<level} (1 + delta^j(eps))^2."""
    out = 1.0
    for j in range(level):
        out *= (1 + delta_iterate(eps, j)) ** 2
    return out


def _norm2(v: np.ndarray) -> float:
    return float(np.vdot(v, v).real)


def two_projection_bound(K: SubspaceFrame, L: SubspaceFrame, eps: float, xi: np.ndarray) -> tuple[float, float]:
    """(||P_K xi||^2 + ||P_L xi||^2, (1+eps)^2 ||P_{K v L} xi||^2)."""
    measured = eps_of_pair(K, L)
    if measured > eps + 1e-12:
        raise AdmissibilityError(f"measured eps {measured:.6g} exceeds the claimed {eps:.6g}")
    xi = np.asarray(xi, dtype=complex)
    lhs = _norm2(K.project(xi)) + _norm2(L.project(xi))
    rhs = (1 + eps) ** 2 * _norm2(join([K, L]).project(xi))
    return lhs, rhs


def _pairwise_max(frames: Sequence[SubspaceFrame]) -> float:
    m = 0.0
    for i in range(len(frames)):
        for j in range(i + 1, len(frames)):
            m = max(m, eps_of_pair(frames[i], frames[j]))
    return m


def three_subspace_fact(q1: SubspaceFrame, q2: SubspaceFrame, q3: SubspaceFrame, eps: float) -> tuple[float, float]:
    """(eps((q1 v q2), q3), sqrt(2) eps / sqrt(1 - eps))."""
    measured = _pairwise_max([q1, q2, q3])
    if measured > eps + 1e-12:
        raise AdmissibilityError(f"measured pairwise eps {measured:.6g} exceeds the claimed {eps:.6g}")
    return eps_of_pair(join([q1, q2]), q3), eps_prime(eps)


def four_projection_bound(ps: Sequence[SubspaceFrame], eps: float) -> tuple[float, float]:
    """(eps((p1 v p2), (p3 v p4)), delta(eps)) for four pairwise eps-orthogonal subspaces."""
    if len(ps) != 4:
        raise ValueError("need exactly four subspaces")
    measured = _pairwise_max(ps)
    if measured > eps + 1e-12:
        raise AdmissibilityError(f"measured pairwise eps {measured:.6g} exceeds the claimed {eps:.6g}")
    return eps_of_pair(join(ps[:2]), join(ps[2:])), delta(eps)


@dataclass(frozen=True, eq=False)
class EpsFamily:
    """2^k subspaces that are pairwise eps-orthogonal.

    ``eps`` is the claimed bound, validated on construction; bounds are always
    evaluated with ``measured_eps``.
    """

    subspaces: tuple[SubspaceFrame, ...]
    eps: float
    measured_eps: float = field(init=False)

    def __post_init__(self):
        subs = tuple(self.subspaces)
        n = len(subs)
        if n < 2 or n & (n - 1):
            raise ValueError(f"family size must be a power of two >= 2, got {n}")
        _check_ambient(subs)
        m = _pairwise_max(subs)
        if m > self.eps + SLACK:
            raise AdmissibilityError(f"claimed eps {self.eps:.6g} but measured pairwise eps is {m:.6g}")
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "measured_eps", m)

    @property
    def k(self) -> int:
        return len(self.subspaces).bit_length() - 1


def family_bound_check(fam: EpsFamily, level: int, xi: np.ndarray) -> tuple[float, float]:
    """(sum_{i <= 2^level} ||p_i xi||^2, prod_j (1 + delta^j(eps))^2 ||P_level xi||^2)."""
    if not 1 <= level <= fam.k:
        raise ValueError(f"level must lie in [1, {fam.k}]")
    eps = fam.measured_eps
    # hypothesis of the product bound for the whole family
    delta_iterate(eps, fam.k - 1)
    xi = np.asarray(xi, dtype=complex)
    subs = fam.subspaces[: 2**level]
    lhs = sum(_norm2(p.project(xi)) for p in subs)
    rhs = family_factor(eps, level) * _norm2(join(subs).project(xi))
    return lhs, rhs


def random_orthonormal(n: int, r: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    A = rng.standard_normal((n, r))
    if not real:
        A = A + 1j * rng.standard_normal((n, r))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_eps_family(count: int, rank: int, dim: int, eps: float, rng: np.random.Generator) -> list[SubspaceFrame]:
    """``count`` subspaces of the given rank, pairwise close to eps-orthogonal.

    Starts from exactly orthogonal blocks and tilts each basis vector by an
    angle of at most arcsin(eps) toward a random direction in the other
    blocks. The true pairwise eps must be measured afterwards.
    """
    if count * rank > dim:
        raise ValueError(f"need dim >= count*rank ({count * rank}), got {dim}")
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    Q = random_orthonormal(dim, count * rank, rng)
    blocks = [Q[:, i * rank : (i + 1) * rank] for i in range(count)]
    out = []
    theta_max = math.asin(eps)
    for i, B in enumerate(blocks):
        others = np.hstack([blocks[j] for j in range(count) if j != i]) if count > 1 else np.zeros((dim, 0))
        cols = []
        for c in range(rank):
            v = B[:, c]
            if others.shape[1]:
                w = others @ (rng.standard_normal(others.shape[1]) + 1j * rng.standard_normal(others.shape[1]))
                w /= np.linalg.norm(w)
                th = rng.uniform(0, theta_max)
                v = math.cos(th) * v + math.sin(th) * w
            cols.append(v)
        out.append(SubspaceFrame.span(np.column_stack(cols)))
    return out
