"""Orthogonal representations of Z, second quantization and the free Bogoljubov action.

Also: crossed-product elements with finitely many Fourier modes, the sector
decomposition of L^2(M - L(Z)) relative to a conj-invariant subspace K, and
finite-scale versions of the mixing estimates used in the asymptotic
orthogonality argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .fock import DimensionError, FockVector, HilbertSpec, HVector, apply_letterwise, h_inner, modular_conjugation
from .subspaces import SubspaceFrame, random_orthonormal
from .wick import PreconditionError, WickExpression, W, trace, vacuum_image, wick_adjoint, wick_product

DEFAULT_WINDOW = 64


@dataclass(frozen=True, eq=False)
class OrthogonalRep:
    """pi(n) = gen^n on H, commuting with the conjugation of ``space``."""

    space: HilbertSpec
    gen: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        U = np.array(self.gen, dtype=complex)
        d = self.space.dim
        if U.shape != (d, d):
            raise DimensionError(f"generator must be {d}x{d}, got {U.shape}")
        err = np.max(np.abs(U.conj().T @ U - np.eye(d)))
        if err > self.tol:
            raise ValueError(f"generator is not unitary (error {err:.2e})")
        U.setflags(write=False)
        object.__setattr__(self, "gen", U)
        r = self.conj_residual()
        if r > self.tol:
            raise ValueError(f"generator does not commute with the conjugation (residual {r:.2e})")

    def conj_residual(self) -> float:
        """max |P conj(U) P - U|, zero iff U(conj e) = conj(U e) for all e."""
        P = self.space.conj_matrix()
        return float(np.max(np.abs(P @ self.gen.conj() @ P - self.gen)))

    def matrix(self, g: int) -> np.ndarray:
        if g >= 0:
            return np.linalg.matrix_power(self.gen, g)
        return np.linalg.matrix_power(self.gen.conj().T, -g)

    def act(self, g: int, e: HVector) -> HVector:
        return HVector(e.space, self.matrix(g) @ e.coeffs)

    @classmethod
    def from_real_orthogonal(cls, space: HilbertSpec, O: np.ndarray) -> OrthogonalRep:
        """Complexify a real orthogonal matrix written in the conj-fixed basis of ``space``."""
        B = space.real_basis()
        return cls(space, B @ np.asarray(O, dtype=float) @ B.conj().T)

    @classmethod
    def random(cls, space: HilbertSpec, rng: np.random.Generator) -> OrthogonalRep:
        O = random_orthonormal(space.dim, space.dim, rng, real=True).real
        return cls.from_real_orthogonal(space, O)

    @classmethod
    def shift(cls, space: HilbertSpec) -> OrthogonalRep:
        """Cyclic shift e_i -> e_{i+1} (real basis only)."""
        d = space.dim
        return cls(space, np.roll(np.eye(d), 1, axis=0))

    def to_json(self) -> str:
        return json.dumps(
            {
                "dim": self.space.dim,
                "conj_perm": list(self.space.conj_perm),
                "gen": [[{"re": z.real, "im": z.imag} for z in row] for row in self.gen.tolist()],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> OrthogonalRep:
        d = json.loads(text)
        space = HilbertSpec(d["dim"], tuple(d.get("conj_perm") or range(d["dim"])))
        gen = np.array([[complex(z["re"], z["im"]) for z in row] for row in d["gen"]])
        return cls(space, gen)


def second_quantize(rep: OrthogonalRep, g: int, psi: FockVector) -> FockVector:
    """F(pi(g)) = id on C Omega plus pi(g)^{(x)n} on each H^{(x)n}."""
    if rep.space != psi.space:
        raise DimensionError("space mismatch")
    return apply_letterwise(rep.matrix(g), psi)


def bogoljubov_act(rep: OrthogonalRep, g: int, x: WickExpression) -> WickExpression:
    """sigma_g = Ad F(pi(g)): every letter is moved by pi(g)."""
    if rep.space != x.space:
        raise DimensionError("space mismatch")
    U = rep.matrix(g)
    return WickExpression(
        x.space,
        x.scalar,
        [(c, [HVector(x.space, U @ e.coeffs) for e in w.letters]) for c, w in x.terms],
    )


class MixingResult(NamedTuple):
    tau: complex
    inner: complex

    @property
    def residual(self) -> float:
        return abs(self.tau - self.inner)


def mixing_coefficient(rep: OrthogonalRep, g: int, e: HVector, f: HVector) -> MixingResult:
    """tau(sigma_g(W(e)) W(f)) next to <pi(g) e, f> for conj-fixed e, f."""
    if not (e.is_real() and f.is_real()):
        raise PreconditionError("mixing coefficient needs conj-fixed letters")
    tau = trace(wick_product(bogoljubov_act(rep, g, W(e)), W(f)))
    return MixingResult(tau, h_inner(rep.act(g, e), f))


class CrossedProductElement:
    """sum_h x^h u_h with Wick coefficients, modes confined to [-window, window]."""

    __slots__ = ("space", "fourier", "window")

    def __init__(self, space: HilbertSpec, fourier: Mapping[int, WickExpression], window: int = DEFAULT_WINDOW):
        clean = {}
        for h, a in fourier.items():
            h = int(h)
            if abs(h) > window:
                raise ValueError(f"mode {h} outside the window [-{window}, {window}]")
            if a.space != space:
                raise DimensionError("space mismatch")
            if a.scalar != 0 or a.terms:
                clean[h] = a
        self.space = space
        self.fourier = dict(sorted(clean.items()))
        self.window = window

    @classmethod
    def u(cls, space: HilbertSpec, g: int, window: int = DEFAULT_WINDOW) -> CrossedProductElement:
        return cls(space, {g: WickExpression.identity(space)}, window)

    @classmethod
    def of(cls, x: WickExpression, h: int = 0, window: int = DEFAULT_WINDOW) -> CrossedProductElement:
        return cls(x.space, {h: x}, window)

    def __add__(self, other: CrossedProductElement) -> CrossedProductElement:
        modes = dict(self.fourier)
        for h, a in other.fourier.items():
            modes[h] = modes[h] + a if h in modes else a
        return CrossedProductElement(self.space, modes, min(self.window, other.window))

    def __mul__(self, c: complex) -> CrossedProductElement:
        return CrossedProductElement(self.space, {h: a * c for h, a in self.fourier.items()}, self.window)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1

    def __repr__(self):
        return f"CrossedProductElement(modes={list(self.fourier)})"


def cp_product(x: CrossedProductElement, y: CrossedProductElement, rep: OrthogonalRep) -> CrossedProductElement:
    """(a u_g)(b u_h) = a sigma_g(b) u_{g+h}."""
    window = min(x.window, y.window)
    out: dict[int, WickExpression] = {}
    for g, a in x.fourier.items():
        for h, b in y.fourier.items():
            m = g + h
            if abs(m) > window:
                raise ValueError(f"product mode {m} leaves the window [-{window}, {window}]")
            term = wick_product(a, bogoljubov_act(rep, g, b))
            out[m] = out[m] + term if m in out else term
    return CrossedProductElement(x.space, out, window)


def cp_adjoint(x: CrossedProductElement, rep: OrthogonalRep) -> CrossedProductElement:
    """(a u_h)^* = sigma_{-h}(a^*) u_{-h}."""
    return CrossedProductElement(
        x.space, {-h: bogoljubov_act(rep, -h, wick_adjoint(a)) for h, a in x.fourier.items()}, x.window
    )


def cp_trace(x: CrossedProductElement) -> complex:
    a = x.fourier.get(0)
    return trace(a) if a is not None else 0j


def cp_norm2(x: CrossedProductElement) -> float:
    """||x||_2^2 = sum_h ||x^h Omega||^2."""
    return float(sum(vacuum_image(a).norm() ** 2 for a in x.fourier.values()))


@dataclass(frozen=True)
class SectorMass:
    """Squared 2-norm of x split along L^2(M) = C(x)l2 + K(x)l2 + K^perp(x)l2 + X^1 + X^2 + X^3 + Y."""

    k: float
    k_perp: float
    x1: float
    x2: float
    x3: float
    y: float
    scalar: float

    @property
    def total(self) -> float:
        return self.k + self.k_perp + self.x1 + self.x2 + self.x3 + self.y + self.scalar

    @property
    def off_group(self) -> float:
        return self.total - self.scalar


def check_conj_invariant(K: SubspaceFrame, space: HilbertSpec, tol: float = 1e-10):
    P = space.conj_matrix()
    Kbar = SubspaceFrame(P @ K.frame.conj())
    err = np.max(np.abs(K.projector() - Kbar.projector()), initial=0.0)
    if err > tol:
        raise PreconditionError(f"K is not invariant under conjugation (projector error {err:.2e})")


def _mass(t: np.ndarray) -> float:
    return float(np.vdot(t, t).real)


def sector_decompose(x: CrossedProductElement, K: SubspaceFrame, rep: OrthogonalRep) -> SectorMass:
    """Split each x^h Omega by first letter in K / K^perp and last letter in pi(h)K / its complement."""
    if K.ambient_dim != x.space.dim:
        raise DimensionError("K lives in a different ambient space")
    check_conj_invariant(K, x.space)
    PK = K.projector()
    I = np.eye(x.space.dim)
    acc = dict(k=0.0, k_perp=0.0, x1=0.0, x2=0.0, x3=0.0, y=0.0, scalar=0.0)
    for h, a in x.fourier.items():
        v = vacuum_image(a)
        Q = K.transform(rep.matrix(h)).projector()
        for n in sorted(v.degrees()):
            t = v.tensor(n)
            if n == 0:
                acc["scalar"] += _mass(t)
            elif n == 1:
                acc["k"] += _mass(PK @ t)
                acc["k_perp"] += _mass((I - PK) @ t)
            else:
                first_in = np.tensordot(PK, t, axes=([1], [0]))
                first_out = t - first_in
                for key_in, key_out, head in (("x1", "x2", first_in), ("x3", "y", first_out)):
                    last_in = np.tensordot(head, Q, axes=([n - 1], [1]))
                    acc[key_in] += _mass(last_in)
                    acc[key_out] += _mass(head - last_in)
    return SectorMass(**acc)


class ClaimResult(NamedTuple):
    measured: float
    predicted: float
    per_degree: tuple[float, ...]


def _as_frame(K) -> SubspaceFrame:
    if isinstance(K, SubspaceFrame):
        F = K
    else:
        V = np.asarray(K, dtype=complex)
        F = SubspaceFrame.span(V)
        if F.rank < (V.shape[1] if V.ndim == 2 else 1):
            raise PreconditionError("frame vectors are linearly dependent")
    if F.rank == 0:
        raise PreconditionError("K must be nonzero")
    return F


def claim_check(rep: OrthogonalRep, g: int, K, cutoff: int) -> ClaimResult:
    """||P_{K(x)F} rho(g) P_{K(x)F}|| on words of length <= cutoff, with the bound r max|<pi(g) z_i, z_j>|.

    On degree n the compression, written in the basis z_i (x) word, is
    (Z^* U Z) (x) U^{(x)(n-1)}; its norm is taken from an SVD.
    """
    F = _as_frame(K)
    if F.ambient_dim != rep.space.dim:
        raise DimensionError("K lives in a different ambient space")
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    U = rep.matrix(g)
    Z = F.frame
    A = Z.conj().T @ U @ Z
    predicted = F.rank * float(np.max(np.abs(A)))
    norms = []
    tail = np.ones((1, 1), dtype=complex)
    for n in range(1, cutoff + 1):
        M = np.kron(A, tail)
        norms.append(float(np.linalg.svd(M, compute_uv=False)[0]))
        tail = np.kron(tail, U)
    return ClaimResult(max(norms), predicted, tuple(norms))


def step3_pairing(
    a_letters: Sequence[HVector],
    b_letters: Sequence[HVector],
    e_modes: Mapping[int, HVector],
    f_modes: Mapping[int, HVector],
    rep: OrthogonalRep,
    tol: float = 1e-10,
) -> complex:
    """sum_h < conj(f_h) (x) xi_1 ... xi_s (x) e_h , pi(h)eta_1 ... pi(h)eta_t >.

    Zero unless t = s + 2. The e_h, f_h must be orthogonal to the span of the
    xi's and eta's.
    """
    a_letters, b_letters = list(a_letters), list(b_letters)
    letters = a_letters + b_letters
    if letters:
        K = SubspaceFrame.span(np.column_stack([v.coeffs for v in letters]))
        for label, modes in (("e", e_modes), ("f", f_modes)):
            for h, v in modes.items():
                leak = np.linalg.norm(K.frame.conj().T @ v.coeffs)
                if leak > tol * max(1.0, v.norm()):
                    raise PreconditionError(f"{label}_{h} is not orthogonal to K (component {leak:.2e})")
    s, t = len(a_letters), len(b_letters)
    if t != s + 2:
        return 0j
    total = 0j
    for h in sorted(set(e_modes) & set(f_modes)):
        U = rep.matrix(h)
        left = [HVector(f_modes[h].space, np.conj(f_modes[h].coeffs[f_modes[h].space.perm_array]))] + a_letters + [e_modes[h]]
        prod = 1 + 0j
        for l, r in zip(left, b_letters):
            prod *= complex(np.vdot(U @ r.coeffs, l.coeffs))
            if prod == 0:
                break
        total += prod
    return total


def crossed_conjugation(vectors: Mapping[int, FockVector], rep: OrthogonalRep) -> dict[int, FockVector]:
    """calJ(xi (x) delta_g) = J rho(-g) xi (x) delta_{-g} on F(H) (x) l2(Z)."""
    return {-g: modular_conjugation(second_quantize(rep, -g, v)) for g, v in vectors.items()}
