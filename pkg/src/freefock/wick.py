"""Wick words W(e_1 (x) ... (x) e_n), their algebra, and the vacuum trace.

Products are computed symbolically with the peel-the-first-letter recursion

    W(e_0 (x) E) W(F) = W(e_0) [W(E) W(F)] - <e0bar, e_1> W(E[1:]) W(F),
    W(e_0) W(f_1 (x) F) = W(e_0 (x) f_1 (x) F) + <e0bar, f_1> W(F),

so traces of products never see a truncation. Operator application
(:func:`wick_apply`) is the only place where the Fock cutoff enters.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fock import (
    PRUNE,
    CutoffError,
    DimensionError,
    FockVector,
    HilbertSpec,
    HVector,
    annihilate,
    conj_vector,
    create,
    inner,
    modular_conjugation,
    required_cutoff,
)


class PreconditionError(ValueError):
    pass


def pairing(e: HVector, f: HVector) -> complex:
    """<conj(e), f>: the contraction coefficient between adjacent Wick letters.

    Symmetric and bilinear; equals <e, f> when f is conj-fixed.
    """
    if e.space != f.space:
        raise DimensionError("space mismatch")
    return complex(np.dot(e.coeffs[e.space.perm_array], f.coeffs))


@dataclass(frozen=True, eq=False)
class WickWord:
    letters: tuple[HVector, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("a Wick word needs at least one letter")
        sp = self.letters[0].space
        if any(e.space != sp for e in self.letters):
            raise DimensionError("all letters of a Wick word must share one space")
        object.__setattr__(self, "letters", tuple(self.letters))

    @property
    def space(self) -> HilbertSpec:
        return self.letters[0].space

    def __len__(self):
        return len(self.letters)


def _letter_key(v: np.ndarray):
    return tuple(np.round(v.real, 12) + 0.0) + tuple(np.round(v.imag, 12) + 0.0)


def _normalize(letters: Sequence[HVector]) -> tuple[complex, tuple[HVector, ...], tuple] | None:
    """Pull a scalar out of each letter so its largest entry is exactly 1."""
    factor = 1 + 0j
    out = []
    keys = []
    for e in letters:
        c = e.coeffs
        k = int(np.argmax(np.abs(c)))
        a = c[k]
        if a == 0:
            return None
        v = c / a
        v[k] = 1.0
        factor *= a
        out.append(HVector(e.space, v))
        keys.append(_letter_key(v))
    return factor, tuple(out), tuple(keys)


class WickExpression:
    """scalar * 1 + sum_i coeff_i * W(word_i), kept in a merged normal form."""

    __slots__ = ("space", "scalar", "terms")

    def __init__(self, space: HilbertSpec, scalar: complex = 0, terms: Iterable[tuple[complex, WickWord | Sequence[HVector]]] = (), prune: float = PRUNE):
        merged: dict[tuple, list] = {}
        for coeff, word in terms:
            letters = word.letters if isinstance(word, WickWord) else tuple(word)
            if not letters:
                scalar += coeff
                continue
            if any(e.space != space for e in letters):
                raise DimensionError("letter space does not match expression space")
            norm = _normalize(letters)
            if norm is None:
                continue
            factor, canon, key = norm
            slot = merged.get(key)
            if slot is None:
                merged[key] = [coeff * factor, canon]
            else:
                slot[0] += coeff * factor
        self.space = space
        self.scalar = complex(scalar) if abs(scalar) > prune else 0j
        self.terms: tuple[tuple[complex, WickWord], ...] = tuple(
            (complex(c), WickWord(w)) for c, w in merged.values() if abs(c) > prune
        )

    @classmethod
    def identity(cls, space: HilbertSpec, c: complex = 1) -> WickExpression:
        return cls(space, c)

    @classmethod
    def word(cls, *letters: HVector, coeff: complex = 1) -> WickExpression:
        return cls(letters[0].space, 0, [(coeff, letters)])

    def degree(self) -> int:
        return max((len(w) for _, w in self.terms), default=0)

    def __add__(self, other):
        if not isinstance(other, WickExpression):
            return WickExpression(self.space, self.scalar + other, self.terms)
        if other.space != self.space:
            raise DimensionError("space mismatch")
        return WickExpression(self.space, self.scalar + other.scalar, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WickExpression):
            return wick_product(self, other)
        return WickExpression(self.space, self.scalar * other, [(c * other, w) for c, w in self.terms])

    def __rmul__(self, other):
        return WickExpression(self.space, self.scalar * other, [(c * other, w) for c, w in self.terms])

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = WickExpression.identity(self.space)
        for _ in range(k):
            out = wick_product(out, self)
        return out

    def __repr__(self):
        def num(z):
            return f"{z.real:.4g}" if z.imag == 0 else f"({z:.4g})"

        parts = [num(self.scalar)] if self.scalar else []
        parts += [f"{num(c)}*W<deg {len(w)}>" for c, w in self.terms[:6]]
        if len(self.terms) > 6:
            parts.append(f"... ({len(self.terms)} terms)")
        return "WickExpression(" + " + ".join(parts or ["0"]) + ")"

    def to_json(self) -> str:
        def cx(z):
            return {"re": z.real, "im": z.imag}

        return json.dumps(
            {
                "scalar": cx(self.scalar),
                "terms": [
                    {"coeff": cx(c), "letters": [[cx(complex(z)) for z in e.coeffs] for e in w.letters]}
                    for c, w in self.terms
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str, space: HilbertSpec) -> WickExpression:
        d = json.loads(text)

        def cx(z):
            return complex(z["re"], z["im"])

        terms = [
            (cx(t["coeff"]), [HVector(space, [cx(z) for z in letter]) for letter in t["letters"]])
            for t in d["terms"]
        ]
        return cls(space, cx(d["scalar"]), terms)


def W(*letters: HVector) -> WickExpression:
    """Shorthand for the single Wick word W(e_1 (x) ... (x) e_n)."""
    return WickExpression.word(*letters)


def wick_apply(x: WickExpression, psi: FockVector) -> FockVector:
    """Apply x to psi through the Wick formula

    W(e_1 ... e_n) = sum_k l(e_1)...l(e_k) l(conj e_{k+1})^* ... l(conj e_n)^*.
    """
    if x.space != psi.space:
        raise DimensionError("space mismatch")
    acc: dict = defaultdict(complex)
    for w, c in psi.coeffs.items():
        acc[w] += x.scalar * c
    dropped = psi.dropped * abs(x.scalar) ** 2
    for coeff, word in x.terms:
        letters = word.letters
        n = len(letters)
        tails = [None] * (n + 1)
        tails[n] = psi
        for j in range(n - 1, -1, -1):
            tails[j] = annihilate(conj_vector(letters[j]), tails[j + 1])
        for k in range(n + 1):
            t = tails[k]
            for j in range(k - 1, -1, -1):
                t = create(letters[j], t)
            for w, c in t.coeffs.items():
                acc[w] += coeff * c
            dropped += t.dropped * abs(coeff) ** 2
    return FockVector._trusted(psi.space, psi.cutoff, acc, dropped, psi.prune)


def wick_apply_right(y: WickExpression, psi: FockVector) -> FockVector:
    """Right multiplication psi -> psi . y, realised as J y^* J."""
    return modular_conjugation(wick_apply(wick_adjoint(y), modular_conjugation(psi)))


def _word_product(E: tuple, F: tuple, B: np.ndarray, memo: dict) -> dict[tuple, complex]:
    if not E:
        return {F: 1.0}
    if not F:
        return {E: 1.0}
    key = (E, F)
    if key in memo:
        return memo[key]
    res: dict[tuple, complex] = defaultdict(complex)
    if len(E) == 1:
        res[E + F] += 1.0
        b = B[E[0], F[0]]
        if b != 0:
            res[F[1:]] += b
    else:
        for G, c in _word_product(E[1:], F, B, memo).items():
            res[(E[0],) + G] += c
            if G:
                b = B[E[0], G[0]]
                if b != 0:
                    res[G[1:]] += c * b
        b = B[E[0], E[1]]
        if b != 0:
            for G, c in _word_product(E[2:], F, B, memo).items():
                res[G] -= b * c
    memo[key] = res
    return res


def wick_product(x: WickExpression, y: WickExpression) -> WickExpression:
    if x.space != y.space:
        raise DimensionError("space mismatch")
    space = x.space
    table: list[HVector] = []
    ids: dict[int, int] = {}

    def index(word: WickWord) -> tuple:
        out = []
        for e in word.letters:
            if id(e) not in ids:
                ids[id(e)] = len(table)
                table.append(e)
            out.append(ids[id(e)])
        return tuple(out)

    xs = [(c, index(w)) for c, w in x.terms]
    ys = [(c, index(w)) for c, w in y.terms]
    if table:
        M = np.array([e.coeffs for e in table])
        B = M[:, space.perm_array] @ M.T
    else:
        B = np.zeros((0, 0))

    terms: list[tuple[complex, tuple]] = []
    terms += [(x.scalar * c, w) for c, w in ys]
    terms += [(y.scalar * c, w) for c, w in xs]
    memo: dict = {}
    scalar = x.scalar * y.scalar
    for a, E in xs:
        for b, F in ys:
            for G, c in _word_product(E, F, B, memo).items():
                if G:
                    terms.append((a * b * c, G))
                else:
                    scalar += a * b * c
    return WickExpression(space, scalar, [(c, [table[i] for i in G]) for c, G in terms])


def wick_adjoint(x: WickExpression) -> WickExpression:
    """W(e_1 ... e_n)^* = W(conj e_n ... conj e_1); coefficients conjugated."""
    return WickExpression(
        x.space,
        np.conj(x.scalar),
        [(np.conj(c), [conj_vector(e) for e in reversed(w.letters)]) for c, w in x.terms],
    )


def trace(x: WickExpression) -> complex:
    """Vacuum state tau(x) = <x Omega, Omega>; only the identity component survives."""
    return x.scalar


def centered(x: WickExpression) -> WickExpression:
    return x - trace(x)


def semicircle_moment(e: HVector, k: int, cutoff: int | None = None) -> float:
    """tau(W(e)^k) by repeated application of l(e) + l(e)^* to the vacuum."""
    if not e.is_real():
        raise PreconditionError("semicircle moments need a conj-fixed letter")
    need = required_cutoff(k)
    if cutoff is None:
        cutoff = need
    if cutoff < need:
        raise CutoffError(f"cutoff {cutoff} too small for moment {k}; need {need}")
    omega = FockVector.vacuum(e.space, cutoff)
    psi = omega
    for _ in range(k):
        psi = create(e, psi) + annihilate(e, psi)
    return float(inner(psi, omega).real)


def freeness_probe(
    families: Sequence[Sequence[WickExpression]],
    pattern: Sequence[tuple[int, int]],
    max_degree: int | None = None,
    tol: float = 1e-10,
) -> complex:
    """Trace of the alternating product selected by ``pattern``.

    ``pattern`` lists (family, member) pairs. Consecutive entries must come
    from different families, at least two families must occur, and every
    selected element must already be centered.
    """
    if not pattern:
        raise PreconditionError("empty pattern")
    fams = [f for f, _ in pattern]
    if len(set(fams)) < 2:
        raise PreconditionError("pattern must mix at least two families")
    for a, b in zip(fams, fams[1:]):
        if a == b:
            raise PreconditionError(f"consecutive entries from family {a}")
    elems = [families[f][m] for f, m in pattern]
    for (f, m), x in zip(pattern, elems):
        if abs(trace(x)) > tol:
            raise PreconditionError(f"element {m} of family {f} is not centered (trace {trace(x):.3g})")
    total = sum(x.degree() for x in elems)
    if max_degree is not None and total > max_degree:
        raise PreconditionError(f"total degree {total} exceeds max_degree {max_degree}")
    prod = elems[0]
    for x in elems[1:]:
        prod = wick_product(prod, x)
    return trace(prod)


def vacuum_image(x: WickExpression, cutoff: int | None = None) -> FockVector:
    """x Omega; the default cutoff is the degree of x, which makes it exact."""
    L = x.degree() if cutoff is None else cutoff
    return wick_apply(x, FockVector.vacuum(x.space, L))
