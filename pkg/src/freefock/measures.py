"""Probability measures on the circle T = R/Z (angles measured in turns).

Three representations are supported:

* :class:`AtomicMeasure` -- finitely many atoms;
* :class:`GridMeasure` -- point masses on the N-th roots of unity, N a power of two;
* :class:`CantorMeasure` -- a self-similar measure on an arc: each arc is
  replaced by equally weighted sub-arcs of relative length ``ratio``, whose
  left endpoints sit at fractions ``offsets`` of the parent arc.

Fourier-Stieltjes coefficients follow mu^(n) = int z^n dmu(z) = sum_k w_k e^{2 pi i n theta_k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

DEFAULT_GRID = 2**14
GRID_FLOOR = 1e-15  # FFT round-off floor for grid weights
MASS_TOL = 1e-12
MAX_DENSE_SUPPORT = 2048


class ResolutionError(ValueError):
    """Grid sizes do not match and resampling was not allowed."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class FourierWindow:
    """mu^(n) for n = -N..N; ``tail_bound[n + N]`` bounds the truncation error if known."""

    coeffs: np.ndarray
    tail_bound: np.ndarray | None = None
    source: str = ""

    @property
    def N(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def n(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def coeff(self, n: int) -> complex:
        if abs(n) > self.N:
            raise IndexError(f"|n| = {abs(n)} outside window {self.N}")
        return complex(self.coeffs[n + self.N])

    def nonnegative(self) -> np.ndarray:
        return self.coeffs[self.N :]


def _window_from_nonneg(c: np.ndarray, source: str, tail: np.ndarray | None = None) -> FourierWindow:
    c = np.array(c, dtype=complex)
    c[0] = 1.0  # total mass is normalised on construction
    full = np.concatenate([np.conj(c[:0:-1]), c])
    tb = None if tail is None else np.concatenate([tail[:0:-1], tail])
    return FourierWindow(full, tb, source)


def _bin_intervals(lefts: np.ndarray, lengths: np.ndarray, masses: np.ndarray, nbins: int, shift: float = 0.0) -> np.ndarray:
    """Spread mass uniformly over arcs [l, l+len) and integrate over bins [j/nbins, (j+1)/nbins)."""
    L = np.mod(lefts + shift, 1.0) * nbins
    R = L + lengths * nbins
    # snap near-integer endpoints so aligned arcs do not leak round-off into neighbours
    for X in (L, R):
        r = np.round(X)
        near = np.abs(X - r) < 1e-9
        X[near] = r[near]
    b0 = np.floor(L).astype(np.int64)
    b1 = np.floor(R).astype(np.int64)
    acc = np.zeros(2 * nbins + 2)
    same = b0 == b1
    np.add.at(acc, b0[same], masses[same])
    d = ~same
    if np.any(d):
        dens = masses[d] / (R[d] - L[d])
        np.add.at(acc, b0[d], dens * (b0[d] + 1 - L[d]))
        np.add.at(acc, b1[d], dens * (R[d] - b1[d]))
        diff = np.zeros(2 * nbins + 3)
        np.add.at(diff, b0[d] + 1, dens)
        np.add.at(diff, b1[d], -dens)
        acc += np.cumsum(diff)[: 2 * nbins + 2]
    out = acc[:nbins] + acc[nbins : 2 * nbins]
    for j, v in enumerate(acc[2 * nbins :]):
        out[j % nbins] += v
    return out


def _clean(w: np.ndarray) -> np.ndarray:
    w = np.where(np.abs(w) < GRID_FLOOR, 0.0, w)
    w = np.clip(w, 0.0, None)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    angles: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        a = np.mod(np.asarray(self.angles, dtype=float).reshape(-1), 1.0)
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if a.shape != m.shape or a.size == 0:
            raise ValueError("angles and masses must be nonempty and of equal length")
        if np.any(m <= 0):
            raise ValueError("atom masses must be positive")
        if abs(m.sum() - 1) > MASS_TOL:
            raise ValueError(f"total mass {m.sum()!r} is not 1")
        a.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "masses", m)

    @classmethod
    def dirac(cls, angle: float = 0.0) -> AtomicMeasure:
        return cls([angle], [1.0])

    @classmethod
    def symmetric_pair(cls, theta: float) -> AtomicMeasure:
        return cls([theta, -theta], [0.5, 0.5])

    def fourier(self, N: int) -> FourierWindow:
        n = np.arange(N + 1)
        c = np.exp(2j * np.pi * np.outer(n, self.angles)) @ self.masses
        c[0] = self.masses.sum()
        return _window_from_nonneg(c, "atomic")

    def cell_masses(self, level: int) -> np.ndarray:
        nb = 2**level
        idx = np.floor(self.angles * nb).astype(np.int64) % nb
        return np.bincount(idx, self.masses, minlength=nb)

    def to_grid(self, N: int) -> GridMeasure:
        idx = np.round(self.angles * N).astype(np.int64) % N
        return GridMeasure(np.bincount(idx, self.masses, minlength=N))

    def reflect(self) -> AtomicMeasure:
        return AtomicMeasure(-self.angles, self.masses)


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Weight ``weights[k]`` at angle k/N."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not _is_pow2(w.size):
            raise ValueError(f"grid size must be a power of two, got {w.size}")
        if np.any(w < 0):
            raise ValueError("grid weights must be nonnegative")
        if abs(w.sum() - 1) > MASS_TOL:
            raise ValueError(f"total mass {w.sum()!r} is not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def N(self) -> int:
        return self.weights.size

    @classmethod
    def haar(cls, N: int = DEFAULT_GRID) -> GridMeasure:
        return cls(np.full(N, 1.0 / N))

    @classmethod
    def from_density(cls, density, N: int = DEFAULT_GRID) -> GridMeasure:
        """Sample a density (callable on angles in [0, 1)) on the grid and normalise."""
        w = np.asarray(density(np.arange(N) / N), dtype=float)
        return cls(w / w.sum())

    def dft(self) -> np.ndarray:
        """mu^(n) for n = 0..N-1 (periodic in n)."""
        return np.fft.ifft(self.weights) * self.N

    def fourier(self, N: int) -> FourierWindow:
        F = self.dft()
        n = np.arange(N + 1)
        c = F[n % self.N]
        c[0] = self.weights.sum()
        return _window_from_nonneg(c, "grid")

    def cell_masses(self, level: int) -> np.ndarray:
        nb = 2**level
        idx = (np.arange(self.N, dtype=np.int64) * nb) // self.N
        return np.bincount(idx, self.weights, minlength=nb)

    def to_grid(self, N: int) -> GridMeasure:
        if N == self.N:
            return self
        if N % self.N == 0:
            w = np.zeros(N)
            w[:: N // self.N] = self.weights
            return GridMeasure(w)
        r = self.N // N
        idx = np.round(np.arange(self.N) / r).astype(np.int64) % N
        return GridMeasure(np.bincount(idx, self.weights, minlength=N))

    def reflect(self) -> GridMeasure:
        return GridMeasure(np.roll(self.weights[::-1], 1))

    def rotate(self, k: int) -> GridMeasure:
        """Push forward under z -> z e^{2 pi i k / N}."""
        return GridMeasure(np.roll(self.weights, k))

    def support_points(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)


@dataclass(frozen=True, eq=False)
class CantorMeasure:
    """Self-similar measure on the arc [center - half_width, center + half_width].

    ``depth`` is the number of levels used by the Fourier product (the
    remaining factor is bounded and reported) and the deepest level used when
    rendering to cells.
    """

    center: float
    half_width: float
    ratio: float
    offsets: tuple[float, ...] = (0.0, 0.5)
    depth: int = 40
    symmetrized: bool = False

    def __post_init__(self):
        if not 0 < self.ratio < 0.5:
            raise ValueError(f"contraction ratio must lie in (0, 1/2), got {self.ratio}")
        if not 0 < self.half_width <= 0.5:
            raise ValueError("half_width must lie in (0, 1/2]")
        offs = tuple(sorted(float(a) for a in self.offsets))
        if len(offs) < 2:
            raise ValueError("need at least two branches")
        if offs[0] < 0 or offs[-1] > 1 - self.ratio + 1e-15:
            raise ValueError("children must lie inside the parent arc")
        if any(b - a < self.ratio - 1e-15 for a, b in zip(offs, offs[1:])):
            raise ValueError("children arcs overlap")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        object.__setattr__(self, "offsets", offs)

    @property
    def left(self) -> float:
        return self.center - self.half_width

    @property
    def length(self) -> float:
        return 2 * self.half_width

    @property
    def branches(self) -> int:
        return len(self.offsets)

    def fourier(self, N: int) -> FourierWindow:
        n = np.arange(N + 1, dtype=float)
        a = np.asarray(self.offsets)
        c = np.exp(2j * np.pi * n * self.left)
        scale = self.length
        for _ in range(self.depth):
            c = c * np.exp(2j * np.pi * np.outer(n * scale, a)).mean(axis=1)
            scale *= self.ratio
        # centre the unresolved tail, which lies in an arc of length `scale`
        c = c * np.exp(1j * np.pi * n * scale)
        tail = np.minimum(2.0, np.pi * n * scale)
        if self.symmetrized:
            c = c.real.astype(complex)
        c[0] = 1.0
        return _window_from_nonneg(c, "cantor", tail)

    def intervals(self, width: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Construction arcs (lefts, lengths, masses), refined until shorter than ``width``."""
        lefts = np.array([self.left])
        ln = self.length
        d = 0
        a = np.asarray(self.offsets)
        while d < self.depth and (width is None and d < 1 or width is not None and ln > width * (1 + 1e-12)):
            lefts = (lefts[:, None] + ln * a[None, :]).reshape(-1)
            ln *= self.ratio
            d += 1
        masses = np.full(lefts.size, 1.0 / lefts.size)
        lengths = np.full(lefts.size, ln)
        if self.symmetrized:
            lefts = np.concatenate([lefts, -(lefts + ln)])
            lengths = np.concatenate([lengths, lengths])
            masses = np.concatenate([masses, masses]) / 2
        return np.mod(lefts, 1.0), lengths, masses

    def construction_cells(self, d: int) -> int:
        return self.branches**d

    def cell_masses(self, level: int) -> np.ndarray:
        nb = 2**level
        lefts, lengths, masses = self.intervals(1.0 / nb)
        return _bin_intervals(lefts, lengths, masses, nb)

    def to_grid(self, N: int) -> GridMeasure:
        lefts, lengths, masses = self.intervals(1.0 / N)
        # grid point k carries the mass of [(k - 1/2)/N, (k + 1/2)/N)
        return GridMeasure(_clean(_bin_intervals(lefts, lengths, masses, N, shift=0.5 / N)))

    def reflect(self) -> CantorMeasure:
        if self.symmetrized:
            return self
        # mirror image: left endpoints at 1 - ratio - a
        offs = tuple(1 - self.ratio - a for a in self.offsets)
        return CantorMeasure(-self.center, self.half_width, self.ratio, offs, self.depth, False)


TorusMeasure = Union[AtomicMeasure, GridMeasure, CantorMeasure]


def fourier(mu: TorusMeasure, N: int) -> FourierWindow:
    return mu.fourier(N)


class SymmetryReport(NamedTuple):
    max_imag: float
    symmetric: bool


def is_symmetric(mu: TorusMeasure, N: int, tol: float = 1e-9) -> SymmetryReport:
    """Symmetric measures have real Fourier coefficients."""
    m = float(np.max(np.abs(mu.fourier(N).coeffs.imag)))
    return SymmetryReport(m, m <= tol)


@dataclass(frozen=True, eq=False)
class DecayProfile:
    """tail_sup[m - 1] = max_{m <= |n| <= N} |mu^(n)| for m = 1..N."""

    abs_coeffs: np.ndarray
    tail_sup: np.ndarray

    @property
    def m(self) -> np.ndarray:
        return np.arange(1, self.tail_sup.size + 1)

    def at(self, m: int) -> float:
        return float(self.tail_sup[m - 1])


def rajchman_profile(mu: TorusMeasure, N: int) -> DecayProfile:
    a = np.abs(mu.fourier(N).nonnegative()[1:])
    tail = np.maximum.accumulate(a[::-1])[::-1]
    return DecayProfile(a, tail)


def render(mu: TorusMeasure, N: int, resample: bool = False) -> GridMeasure:
    if isinstance(mu, GridMeasure) and mu.N != N and not resample:
        raise ResolutionError(f"grid measure has N={mu.N}, requested N={N}; pass resample=True")
    if not _is_pow2(N):
        raise ValueError(f"grid size must be a power of two, got {N}")
    return mu.to_grid(N)


def convolve(mu: TorusMeasure, nu: TorusMeasure, grid: int | None = None, resample: bool = False) -> TorusMeasure:
    """mu * nu. Two atomic measures convolve exactly when no grid is requested;
    otherwise both are rendered on the grid and convolved circularly."""
    if grid is None and isinstance(mu, AtomicMeasure) and isinstance(nu, AtomicMeasure):
        ang = np.mod(mu.angles[:, None] + nu.angles[None, :], 1.0).reshape(-1)
        mass = (mu.masses[:, None] * nu.masses[None, :]).reshape(-1)
        key = np.round(ang, 15)
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.bincount(inv, mass)
        first = np.zeros(uniq.size, dtype=np.int64)
        first[inv[::-1]] = np.arange(inv.size)[::-1]
        return AtomicMeasure(ang[first], merged / merged.sum())
    if grid is None:
        grid = mu.N if isinstance(mu, GridMeasure) else nu.N if isinstance(nu, GridMeasure) else DEFAULT_GRID
    a, b = render(mu, grid, resample), render(nu, grid, resample)
    w = np.fft.ifft(np.fft.fft(a.weights) * np.fft.fft(b.weights)).real
    return GridMeasure(_clean(w))


def m_infinity(mu: TorusMeasure, terms: int = 20, grid: int = DEFAULT_GRID, resample: bool = False) -> GridMeasure:
    """sum_{m=1}^{M} 2^{-m} mu^{*m}, renormalised by 1/(1 - 2^{-M})."""
    if terms < 1:
        raise ValueError("terms must be at least 1")
    F = np.fft.fft(render(mu, grid, resample).weights)
    acc = np.zeros_like(F)
    p = np.ones_like(F)
    for m in range(1, terms + 1):
        p = p * F / 2
        acc += p
    acc /= 1 - 2.0**-terms
    return GridMeasure(_clean(np.fft.ifft(acc).real))


def m_infinity_closed_form(c: np.ndarray) -> np.ndarray:
    """Fourier coefficients of the full series: w / (2 - w)."""
    return c / (2 - c)


@dataclass(frozen=True)
class FamilyParams:
    """Allocation of 2^bits disjoint arcs in the open upper half circle.

    Slot j is [j, j+1) / 2^(bits+1); its arc is the second quarter of the slot,
    so neighbouring arcs are separated by at least one arc length. ``arcs``
    overrides the allocation with explicit (left, length) pairs.
    """

    bits: int
    ratio: float = 0.125
    offsets: tuple[float, ...] = (0.0, 0.625, 0.875)
    depth: int = 40
    arcs: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not 0 <= self.bits <= 16:
            raise ValueError("bits must lie in [0, 16]")
        arcs = self.arc_list()
        if len(arcs) != 2**self.bits:
            raise ValueError(f"need {2**self.bits} arcs, got {len(arcs)}")
        for l, ln in arcs:
            if not (0 < l and l + ln < 0.5 and ln > 0):
                raise ValueError(f"arc [{l}, {l + ln}] is not inside the open upper half circle")
        s = sorted(arcs)
        for (l0, n0), (l1, _) in zip(s, s[1:]):
            if l0 + n0 >= l1:
                raise ValueError(f"arcs starting at {l0} and {l1} overlap")

    def arc_list(self) -> list[tuple[float, float]]:
        if self.arcs is not None:
            return [tuple(a) for a in self.arcs]
        slot = 2.0 ** -(self.bits + 1)
        return [(j * slot + slot / 4, slot / 4) for j in range(2**self.bits)]

    @property
    def construction_level(self) -> int:
        """Dyadic level at which every default arc is a single cell."""
        return self.bits + 3


def cantor_family(x: str, params: FamilyParams) -> CantorMeasure:
    """Symmetrized Cantor measure on the arc pair indexed by the bit string ``x``."""
    if len(x) != params.bits or any(ch not in "01" for ch in x):
        raise ValueError(f"x must be a bit string of length {params.bits}")
    j = int(x, 2) if x else 0
    left, length = params.arc_list()[j]
    return CantorMeasure(left + length / 2, length / 2, params.ratio, params.offsets, params.depth, symmetrized=True)


def support_cells(mu: TorusMeasure, level: int, threshold: float = 0.0) -> frozenset[int]:
    """Dyadic cells [j, j+1) / 2^level whose mass exceeds ``threshold``."""
    return frozenset(int(j) for j in np.flatnonzero(mu.cell_masses(level) > threshold))


def singularity_score(mu: TorusMeasure, nu: TorusMeasure, level: int) -> float:
    """Bhattacharyya affinity sum_I sqrt(mu(I) nu(I)) over dyadic cells of size 2^-level."""
    a = np.clip(mu.cell_masses(level), 0, None)
    b = np.clip(nu.cell_masses(level), 0, None)
    return float(np.sum(np.sqrt(a * b)))


def haar_cells(level: int) -> np.ndarray:
    return np.full(2**level, 2.0**-level)


def haar_affinity(mu: TorusMeasure, level: int) -> float:
    return float(np.sum(np.sqrt(np.clip(mu.cell_masses(level), 0, None) * 2.0**-level)))


def h_space_rep(mu: GridMeasure, n: int = 1, tol: float = 1e-12):
    """Multiplication by z^n on L^2(T, mu) for a symmetric grid measure.

    Coordinates are taken in the orthonormal basis delta_k / sqrt(w_k) over the
    support; conjugation sends the point k/N to -k/N. Returns ``(matrix, rep)``
    where ``rep`` is the orthogonal representation generated by z.
    """
    from .bogoljubov import OrthogonalRep
    from .fock import HilbertSpec

    if not isinstance(mu, GridMeasure):
        raise TypeError("h_space_rep needs a GridMeasure")
    if np.max(np.abs(mu.weights - mu.reflect().weights)) > tol:
        raise ValueError("measure is not symmetric; H_R^mu is undefined")
    pts = mu.support_points()
    if pts.size > MAX_DENSE_SUPPORT:
        raise ValueError(f"support has {pts.size} points; dense representation limited to {MAX_DENSE_SUPPORT}")
    pos = {int(k): i for i, k in enumerate(pts)}
    perm = tuple(pos[int((-k) % mu.N)] for k in pts)
    space = HilbertSpec(len(pts), perm, label=f"L2(T, grid N={mu.N})")
    z = np.exp(2j * np.pi * pts / mu.N)
    rep = OrthogonalRep(space, np.diag(z))
    return np.diag(z**n), rep


def grid_function(mu: GridMeasure, values: np.ndarray):
    """Coordinates of the function with the given grid values in h_space_rep's basis."""
    from .fock import HVector

    pts = mu.support_points()
    values = np.asarray(values, dtype=complex)
    if values.size == mu.N:
        values = values[pts]
    _, rep = h_space_rep(mu)
    return HVector(rep.space, values * np.sqrt(mu.weights[pts]))


def measure_to_dict(mu: TorusMeasure) -> dict:
    if isinstance(mu, AtomicMeasure):
        return {"type": "atomic", "atoms": [[float(a), float(m)] for a, m in zip(mu.angles, mu.masses)]}
    if isinstance(mu, GridMeasure):
        return {"type": "grid", "N": mu.N, "weights": [float(w) for w in mu.weights]}
    return {
        "type": "cantor",
        "center": mu.center,
        "half_width": mu.half_width,
        "ratio": mu.ratio,
        "offsets": list(mu.offsets),
        "depth": mu.depth,
        "symmetrized": mu.symmetrized,
    }


def measure_from_dict(d: dict) -> TorusMeasure:
    kind = d.get("type")
    if kind == "atomic":
        atoms = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
        return AtomicMeasure(atoms[:, 0], atoms[:, 1])
    if kind == "grid":
        return GridMeasure(np.asarray(d["weights"], dtype=float))
    if kind == "haar":
        return GridMeasure.haar(int(d.get("N", DEFAULT_GRID)))
    if kind == "cantor":
        return CantorMeasure(
            float(d["center"]),
            float(d["half_width"]),
            float(d["ratio"]),
            tuple(d.get("offsets", (0.0, 0.5))),
            int(d.get("depth", 40)),
            bool(d.get("symmetrized", False)),
        )
    raise ValueError(f"unknown measure type {kind!r}")
