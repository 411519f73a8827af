"""Pushforward of mu^inf x Haar under Psi(z1, z2) = (z1 conj(z2), z2) and diagnostics on it."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measures import (
    DEFAULT_GRID,
    FourierWindow,
    GridMeasure,
    TorusMeasure,
    haar_affinity,
    m_infinity,
)

NOT_COMPUTED = "not computed"


@dataclass(frozen=True, eq=False)
class TorusSquareMeasure:
    """A measure on T^2 whose Fourier transform lives on the diagonal m = n.

    ``diagonal`` holds eta^(m, m) for m = -N..N. ``minf`` is the grid measure
    mu^inf when one is available, used for renders and fibers.
    """

    diagonal: FourierWindow
    minf: GridMeasure | None = None

    @property
    def N(self) -> int:
        return self.diagonal.N

    def coeff(self, m: int, n: int) -> complex:
        if m != n:
            if max(abs(m), abs(n)) > self.N:
                raise IndexError("mode outside window")
            return 0j
        return self.diagonal.coeff(m)

    def fourier2d(self) -> np.ndarray:
        """Array indexed [m + N, n + N]."""
        return np.diag(self.diagonal.coeffs)

    def render(self) -> np.ndarray:
        """eta[a, b] = mass at (a/N, b/N) on the grid of mu^inf."""
        if self.minf is None:
            raise ValueError("no grid render available; build eta from a grid measure")
        w = self.minf.weights
        G = w.size
        idx = (np.arange(G)[:, None] + np.arange(G)[None, :]) % G
        return w[idx] / G

    def fiber(self, b: int) -> GridMeasure:
        """Law of the first coordinate given the second equals b/N: mu^inf rotated by -b/N."""
        if self.minf is None:
            raise ValueError("no grid render available")
        return self.minf.rotate(-b)


def pushforward_psi(minf: TorusMeasure, N: int) -> TorusSquareMeasure:
    return TorusSquareMeasure(minf.fourier(N), minf if isinstance(minf, GridMeasure) else None)


def eta_from_measure(mu: TorusMeasure, N: int, terms: int = 20, grid: int = DEFAULT_GRID) -> TorusSquareMeasure:
    return pushforward_psi(m_infinity(mu, terms, grid), N)


@dataclass(frozen=True, eq=False)
class MasaInvariantReport:
    ids: tuple[str, ...]
    levels: tuple[int, ...]
    matrices: np.ndarray  # (levels, n, n)
    vs_haar: np.ndarray  # (levels, n)
    max_cell_mass: np.ndarray  # (levels, n)
    window: int
    diagonal_coeffs: np.ndarray  # (n, window + 1) values of eta^(m, m) for m >= 0
    multiplicity: str = NOT_COMPUTED

    @property
    def matrix(self) -> np.ndarray:
        return self.matrices[-1]

    def to_dict(self) -> dict:
        return {
            "ids": list(self.ids),
            "levels": list(self.levels),
            "matrices": {str(l): self.matrices[i].tolist() for i, l in enumerate(self.levels)},
            "vs_haar2": {str(l): self.vs_haar[i].tolist() for i, l in enumerate(self.levels)},
            "fibers": {
                "max_cell_mass": {str(l): self.max_cell_mass[i].tolist() for i, l in enumerate(self.levels)},
            },
            "window": self.window,
            "multiplicity": self.multiplicity,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def disjointness_matrix(
    family: Sequence[TorusMeasure],
    levels: int | Sequence[int],
    window: int = 64,
    terms: int = 20,
    grid: int = DEFAULT_GRID,
    ids: Sequence[str] | None = None,
) -> MasaInvariantReport:
    """Pairwise affinities of the eta_x, computed on the fiber measures mu_x^inf.

    Every fiber of eta_x is a rotation of mu_x^inf, so grid-aligned fibers of
    eta_x and eta_y have the same cell affinity as mu_x^inf and mu_y^inf.
    """
    if not family:
        raise ValueError("family is empty")
    levels = (levels,) if isinstance(levels, int) else tuple(levels)
    ids = tuple(ids) if ids is not None else tuple(str(i) for i in range(len(family)))
    minfs = [m_infinity(mu, terms, grid, resample=True) for mu in family]
    n = len(family)
    mats = np.zeros((len(levels), n, n))
    vs_h = np.zeros((len(levels), n))
    maxc = np.zeros((len(levels), n))
    for li, lev in enumerate(levels):
        cells = [m.cell_masses(lev) for m in minfs]
        for i in range(n):
            mats[li, i, i] = 1.0
            for j in range(i + 1, n):
                s = float(np.sum(np.sqrt(np.clip(cells[i], 0, None) * np.clip(cells[j], 0, None))))
                mats[li, i, j] = mats[li, j, i] = s
            vs_h[li, i] = float(np.sum(np.sqrt(np.clip(cells[i], 0, None) * 2.0**-lev)))
            maxc[li, i] = float(cells[i].max())
    diag = np.array([m.fourier(window).nonnegative() for m in minfs])
    return MasaInvariantReport(ids, levels, mats, vs_h, maxc, window, diag)


@dataclass(frozen=True)
class FiberProbe:
    levels: tuple[int, ...]
    fibers: tuple[int, ...]
    max_cell_mass: np.ndarray  # (fibers, levels)
    haar_affinity: np.ndarray  # (fibers, levels)

    @property
    def atom_suspected(self) -> bool:
        """Largest cell mass fails to shrink from the coarsest to the finest level."""
        return bool(np.any(self.max_cell_mass[:, -1] >= self.max_cell_mass[:, 0] * (1 - 1e-12)))

    @property
    def exotic_consistent(self) -> bool:
        def dec(a):
            return bool(np.all(np.diff(a, axis=1) < 0))

        return dec(self.max_cell_mass) and dec(self.haar_affinity)

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "fibers": list(self.fibers),
            "max_cell_mass": self.max_cell_mass.tolist(),
            "haar_affinity": self.haar_affinity.tolist(),
            "atom_suspected": self.atom_suspected,
            "exotic_consistent": self.exotic_consistent,
        }


def exoticness_probe(eta: TorusSquareMeasure, levels: Sequence[int], n_fibers: int = 8) -> FiberProbe:
    """Atom and Haar-affinity diagnostics on equally spaced fibers (a diagnostic, not a proof)."""
    if eta.minf is None:
        raise ValueError("exoticness_probe needs a grid render")
    G = eta.minf.N
    bs = tuple(int(b) for b in (np.arange(n_fibers) * G) // n_fibers)
    levels = tuple(levels)
    mc = np.zeros((len(bs), len(levels)))
    ha = np.zeros_like(mc)
    for i, b in enumerate(bs):
        f = eta.fiber(b)
        for j, lev in enumerate(levels):
            mc[i, j] = f.cell_masses(lev).max()
            ha[i, j] = haar_affinity(f, lev)
    return FiberProbe(levels, bs, mc, ha)
