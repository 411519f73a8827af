"""Truncated full Fock space over a finite-dimensional Hilbert space.

Vectors are sparse maps from basis words (tuples of basis indices) to complex
coefficients. The empty word is the vacuum. Inner products are linear in the
first argument and conjugate-linear in the second.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

PRUNE = 1e-14

Word = tuple[int, ...]


class DimensionError(ValueError):
    """Operands live on different Hilbert spaces or cutoffs."""


class CutoffError(ValueError):
    """The truncation cutoff is too small for an exact computation."""


@dataclass(frozen=True)
class HilbertSpec:
    """Complex Hilbert space C^dim with a conjugation acting on the basis.

    ``conj_perm[i]`` is the index of the conjugate of basis vector ``i``.
    """

    dim: int
    conj_perm: tuple[int, ...] = None  # type: ignore[assignment]
    label: str | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        perm = tuple(range(self.dim)) if self.conj_perm is None else tuple(int(i) for i in self.conj_perm)
        if sorted(perm) != list(range(self.dim)):
            raise ValueError("conj_perm must be a permutation of range(dim)")
        if any(perm[perm[i]] != i for i in range(self.dim)):
            raise ValueError("conj_perm must be an involution")
        object.__setattr__(self, "conj_perm", perm)

    @property
    def perm_array(self) -> np.ndarray:
        return np.asarray(self.conj_perm, dtype=np.intp)

    def conj_matrix(self) -> np.ndarray:
        """Permutation matrix P with conj(v) = P @ v.conj()."""
        P = np.zeros((self.dim, self.dim))
        P[np.arange(self.dim), self.perm_array] = 1.0
        return P

    def real_basis(self) -> np.ndarray:
        """Unitary matrix whose columns are an orthonormal basis of conj-fixed vectors."""
        cols = []
        seen = set()
        s = 1 / math.sqrt(2)
        for i, j in enumerate(self.conj_perm):
            if i in seen:
                continue
            seen.update((i, j))
            if i == j:
                v = np.zeros(self.dim, complex)
                v[i] = 1
                cols.append(v)
            else:
                v = np.zeros(self.dim, complex)
                v[i], v[j] = s, s
                w = np.zeros(self.dim, complex)
                w[i], w[j] = 1j * s, -1j * s
                cols.extend((v, w))
        return np.column_stack(cols)


def _check_same(a: HilbertSpec, b: HilbertSpec):
    if a != b:
        raise DimensionError(f"space mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class HVector:
    """A single vector of H, stored densely."""

    space: HilbertSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (self.space.dim,):
            raise DimensionError(f"expected {self.space.dim} coefficients, got {c.shape[0]}")
        if not np.all(np.isfinite(c)):
            raise ValueError("HVector entries must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, space: HilbertSpec, i: int) -> HVector:
        c = np.zeros(space.dim, complex)
        c[i] = 1
        return cls(space, c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(conj_vector(self).coeffs - self.coeffs), initial=0.0) <= tol)

    def __add__(self, other: HVector) -> HVector:
        _check_same(self.space, other.space)
        return HVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: HVector) -> HVector:
        _check_same(self.space, other.space)
        return HVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, c: complex) -> HVector:
        return HVector(self.space, self.coeffs * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HVector({np.array2string(self.coeffs, precision=4)})"


def h_inner(e: HVector, f: HVector) -> complex:
    """<e, f> on H, linear in e."""
    _check_same(e.space, f.space)
    return complex(np.vdot(f.coeffs, e.coeffs))


def conj_vector(e: HVector) -> HVector:
    """Canonical conjugation: basis permutation plus complex conjugation of coefficients."""
    return HVector(e.space, np.conj(e.coeffs[e.space.perm_array]))


class FockVector:
    """Sparse vector of the full Fock space truncated at word length ``cutoff``.

    ``dropped`` accumulates the squared norm discarded by truncation in the
    operations that produced this vector. It does not take part in inner
    products or comparisons.
    """

    __slots__ = ("space", "cutoff", "coeffs", "dropped", "prune")

    def __init__(
        self,
        space: HilbertSpec,
        cutoff: int,
        coeffs: Mapping[Word, complex] | None = None,
        dropped: float = 0.0,
        prune: float = PRUNE,
    ):
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        clean: dict[Word, complex] = {}
        for word, c in (coeffs or {}).items():
            word = tuple(int(i) for i in word)
            if len(word) > cutoff:
                raise CutoffError(f"word {word} longer than cutoff {cutoff}")
            if any(i < 0 or i >= space.dim for i in word):
                raise DimensionError(f"word {word} has letters outside range({space.dim})")
            c = complex(c)
            if abs(c) > prune:
                clean[word] = c
        self.space = space
        self.cutoff = cutoff
        self.coeffs = clean
        self.dropped = float(dropped)
        self.prune = prune

    @classmethod
    def _trusted(cls, space: HilbertSpec, cutoff: int, coeffs: Mapping[Word, complex], dropped: float, prune: float) -> FockVector:
        """Internal constructor for words already known to be valid; only prunes."""
        v = cls.__new__(cls)
        v.space, v.cutoff, v.dropped, v.prune = space, cutoff, float(dropped), prune
        v.coeffs = {w: complex(c) for w, c in coeffs.items() if abs(c) > prune}
        return v

    @classmethod
    def vacuum(cls, space: HilbertSpec, cutoff: int) -> FockVector:
        return cls(space, cutoff, {(): 1.0})

    @classmethod
    def word(cls, space: HilbertSpec, cutoff: int, letters: Iterable[int], coeff: complex = 1.0) -> FockVector:
        return cls(space, cutoff, {tuple(letters): coeff})

    @classmethod
    def from_tensor(cls, space: HilbertSpec, cutoff: int, letters: Iterable[HVector], coeff: complex = 1.0) -> FockVector:
        """Elementary tensor e_1 (x) ... (x) e_n expanded in basis words."""
        t = np.asarray(coeff, dtype=complex)
        for e in letters:
            _check_same(space, e.space)
            t = np.multiply.outer(t, e.coeffs)
        return cls.from_tensors(space, cutoff, {t.ndim: t})

    @classmethod
    def from_tensors(cls, space: HilbertSpec, cutoff: int, tensors: Mapping[int, np.ndarray], prune: float = PRUNE) -> FockVector:
        """Build from dense per-degree arrays of shape (dim,)*n."""
        coeffs: dict[Word, complex] = {}
        for n, t in tensors.items():
            t = np.asarray(t, dtype=complex)
            if n == 0:
                coeffs[()] = coeffs.get((), 0) + complex(t)
                continue
            idx = np.argwhere(np.abs(t) > prune)
            for w in idx:
                w = tuple(int(i) for i in w)
                coeffs[w] = t[w]
        return cls(space, cutoff, coeffs, prune=prune)

    def tensor(self, n: int) -> np.ndarray:
        """Dense degree-n component."""
        t = np.zeros((self.space.dim,) * n, dtype=complex)
        for w, c in self.coeffs.items():
            if len(w) == n:
                t[w] = c
        return t

    def degrees(self) -> set[int]:
        return {len(w) for w in self.coeffs}

    def max_degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def degree_part(self, n: int) -> FockVector:
        return FockVector(self.space, self.cutoff, {w: c for w, c in self.coeffs.items() if len(w) == n})

    def with_cutoff(self, cutoff: int) -> FockVector:
        """Re-home the vector on a different cutoff; longer words are dropped and reported."""
        kept = {w: c for w, c in self.coeffs.items() if len(w) <= cutoff}
        lost = sum(abs(c) ** 2 for w, c in self.coeffs.items() if len(w) > cutoff)
        return FockVector(self.space, cutoff, kept, self.dropped + lost, self.prune)

    def _combine(self, other: FockVector, sign: float) -> FockVector:
        _check_same(self.space, other.space)
        if self.cutoff != other.cutoff:
            raise DimensionError(f"cutoff mismatch: {self.cutoff} vs {other.cutoff}")
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + sign * c
        return FockVector._trusted(self.space, self.cutoff, out, self.dropped + other.dropped, self.prune)

    def __add__(self, other: FockVector) -> FockVector:
        return self._combine(other, 1.0)

    def __sub__(self, other: FockVector) -> FockVector:
        return self._combine(other, -1.0)

    def __mul__(self, c: complex) -> FockVector:
        return FockVector._trusted(self.space, self.cutoff, {w: c * v for w, v in self.coeffs.items()}, self.dropped * abs(c) ** 2, self.prune)

    __rmul__ = __mul__

    def __neg__(self) -> FockVector:
        return self * -1

    def allclose(self, other: FockVector, atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol

    def __repr__(self):
        items = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        body = ", ".join(f"{w}: {c:.6g}" for w, c in items[:8])
        more = "" if len(items) <= 8 else f", ... ({len(items)} words)"
        return f"FockVector(dim={self.space.dim}, L={self.cutoff}, {{{body}{more}}})"

    def to_json(self) -> str:
        rows = [
            {"word": list(w), "re": c.real, "im": c.imag}
            for w, c in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        ]
        return json.dumps(rows)

    @classmethod
    def from_json(cls, text: str, space: HilbertSpec, cutoff: int) -> FockVector:
        acc: dict[Word, complex] = defaultdict(complex)
        for row in json.loads(text):
            acc[tuple(row["word"])] += complex(row["re"], row["im"])
        return cls(space, cutoff, acc)


def _same_home(a: FockVector, b: FockVector):
    _check_same(a.space, b.space)
    if a.cutoff != b.cutoff:
        raise DimensionError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")


def create(e: HVector, psi: FockVector) -> FockVector:
    """Left creation operator: prepend the letter ``e`` to every word.

    Words already at the cutoff are discarded; their image's squared norm is
    added to ``dropped`` on the result.
    """
    _check_same(e.space, psi.space)
    nz = [(i, c) for i, c in enumerate(e.coeffs) if c != 0]
    out: dict[Word, complex] = defaultdict(complex)
    lost = 0.0
    for w, c in psi.coeffs.items():
        if len(w) >= psi.cutoff:
            lost += abs(c) ** 2
            continue
        for i, ei in nz:
            out[(i,) + w] += ei * c
    lost *= e.norm() ** 2
    return FockVector._trusted(psi.space, psi.cutoff, out, psi.dropped + lost, psi.prune)


def annihilate(e: HVector, psi: FockVector) -> FockVector:
    """Adjoint of :func:`create`: ``(f_1, ..., f_n) -> <f_1, e> (f_2, ..., f_n)``."""
    _check_same(e.space, psi.space)
    ec = np.conj(e.coeffs)
    out: dict[Word, complex] = defaultdict(complex)
    for w, c in psi.coeffs.items():
        if not w:
            continue
        a = ec[w[0]]
        if a != 0:
            out[w[1:]] += a * c
    return FockVector._trusted(psi.space, psi.cutoff, out, psi.dropped, psi.prune)


def inner(psi: FockVector, phi: FockVector) -> complex:
    _same_home(psi, phi)
    small, big = (psi.coeffs, phi.coeffs) if len(psi.coeffs) <= len(phi.coeffs) else (phi.coeffs, psi.coeffs)
    total = 0j
    for w in small:
        if w in big:
            total += psi.coeffs[w] * phi.coeffs[w].conjugate()
    return total


def modular_conjugation(psi: FockVector) -> FockVector:
    """J: reverse each word, conjugate each letter and each coefficient."""
    perm = psi.space.conj_perm
    out = {tuple(perm[i] for i in reversed(w)): c.conjugate() for w, c in psi.coeffs.items()}
    return FockVector(psi.space, psi.cutoff, out, psi.dropped, psi.prune)


def apply_letterwise(U: np.ndarray, psi: FockVector) -> FockVector:
    """Apply U^{(x)n} on each degree-n component (identity on the vacuum)."""
    tensors = {}
    for n in sorted(psi.degrees()):
        t = psi.tensor(n)
        for axis in range(n):
            t = np.moveaxis(np.tensordot(U, t, axes=([1], [axis])), 0, axis)
        tensors[n] = t
    out = FockVector.from_tensors(psi.space, psi.cutoff, tensors, psi.prune)
    out.dropped = psi.dropped
    return out


def required_cutoff(k: int) -> int:
    """Smallest cutoff for which a length-k walk from the vacuum back to it is exact."""
    return (k + 1) // 2
