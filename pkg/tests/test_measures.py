import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freefock.measures import (
    AtomicMeasure,
    CantorMeasure,
    FamilyParams,
    GridMeasure,
    ResolutionError,
    cantor_family,
    convolve,
    grid_function,
    h_space_rep,
    haar_affinity,
    is_symmetric,
    m_infinity,
    m_infinity_closed_form,
    measure_from_dict,
    measure_to_dict,
    rajchman_profile,
    singularity_score,
    support_cells,
)

from oracles import direct_circular_convolution, middle_thirds_abs, minf_partial_sum

MIDDLE_THIRDS = CantorMeasure(0.5, 0.5, 1 / 3, (0.0, 2 / 3))
MIDDLE_THIRDS_CONST = 0.37143735670876563  # prod_i |cos(2 pi / 3^i)|, mpmath


def smooth(N=2**12):
    return GridMeasure.from_density(lambda t: np.exp(2 * np.cos(2 * np.pi * t) + np.cos(4 * np.pi * t)), N)


def window_invariants(w, exact=False):
    tol = 0 if exact else 1e-10
    assert w.coeff(0) == 1
    assert np.max(np.abs(w.coeffs - np.conj(w.coeffs[::-1]))) <= tol
    assert np.max(np.abs(w.coeffs)) <= 1 + 1e-12


def test_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure([0.1], [0.5])
    with pytest.raises(ValueError):
        GridMeasure(np.full(1000, 1e-3))
    with pytest.raises(ValueError):
        CantorMeasure(0.5, 0.5, 0.6)
    with pytest.raises(ValueError):
        CantorMeasure(0.5, 0.5, 0.4, (0.0, 0.3))


def test_fourier_examples():
    N = 64
    w = GridMeasure.haar(N).fourier(N - 1)
    assert w.coeff(0) == 1
    assert np.max(np.abs(w.coeffs[w.n != 0])) < 1e-14
    d = AtomicMeasure.dirac().fourier(20)
    assert np.all(d.coeffs == 1)
    th = 0.137
    p = AtomicMeasure.symmetric_pair(th).fourier(30)
    assert np.allclose(p.coeffs, np.cos(2 * np.pi * p.n * th), atol=1e-14)
    window_invariants(p, exact=True)


def test_window_invariants_all_representations():
    window_invariants(smooth().fourier(200))
    window_invariants(MIDDLE_THIRDS.fourier(200))
    window_invariants(AtomicMeasure([0.1, 0.7], [0.3, 0.7]).fourier(50), exact=True)


def test_grid_fourier_matches_direct_sum():
    mu = smooth(256)
    n = np.arange(-40, 41)
    direct = np.exp(2j * np.pi * np.outer(n, np.arange(256) / 256)) @ mu.weights
    assert np.allclose(mu.fourier(40).coeffs, direct, atol=1e-13)


def test_cantor_fourier_against_product_oracle():
    w = MIDDLE_THIRDS.fourier(3**8)
    for k in range(9):
        assert abs(w.coeff(3**k)) == pytest.approx(middle_thirds_abs(3**k), abs=1e-12)
    assert middle_thirds_abs(3**5) == pytest.approx(MIDDLE_THIRDS_CONST, abs=1e-14)
    assert w.tail_bound is not None and w.tail_bound[-1] < 1e-9


def test_cantor_fourier_matches_grid_render():
    mu = CantorMeasure(0.3, 0.1, 0.25, (0.0, 0.75), depth=30)
    g = mu.to_grid(2**16)
    # render error is at most the grid half-spacing times 2 pi n
    n = 50
    assert abs(mu.fourier(n).coeff(n) - g.fourier(n).coeff(n)) < 2 * np.pi * n / 2**17


def test_symmetry_reports():
    assert is_symmetric(GridMeasure.haar(64), 63).symmetric
    assert not is_symmetric(AtomicMeasure.dirac(0.2), 10).symmetric
    sym = CantorMeasure(0.2, 0.05, 0.2, (0.0, 0.4, 0.8), symmetrized=True)
    assert is_symmetric(sym, 500).symmetric
    assert is_symmetric(sym.to_grid(2**12), 500, tol=1e-9).symmetric
    assert not is_symmetric(CantorMeasure(0.2, 0.05, 0.2, (0.0, 0.4, 0.8)), 50).symmetric


def test_profiles_distinguish_classes():
    p = rajchman_profile(AtomicMeasure.dirac(), 32)
    assert np.all(p.tail_sup == 1)
    s = rajchman_profile(smooth(), 1024)
    assert s.at(40) < 1e-3
    assert np.all(np.diff(s.tail_sup) <= 0)
    c = rajchman_profile(MIDDLE_THIRDS, 3**8)
    assert min(c.at(3**k) for k in range(9)) > 0.37


def test_convolution_examples():
    mu = smooth(1024)
    assert np.allclose(convolve(mu, AtomicMeasure.dirac()).weights, mu.weights, atol=1e-15)
    h = convolve(GridMeasure.haar(1024), mu)
    assert np.allclose(h.weights, 1 / 1024)
    a, b = AtomicMeasure.symmetric_pair(0.1), AtomicMeasure.symmetric_pair(0.23)
    ab = convolve(a, b)
    assert ab.angles.size <= 4
    n = np.arange(-25, 26)
    assert np.allclose(ab.fourier(25).coeffs, np.cos(2 * np.pi * n * 0.1) * np.cos(2 * np.pi * n * 0.23), atol=1e-14)


def test_convolution_grid_mismatch():
    with pytest.raises(ResolutionError):
        convolve(GridMeasure.haar(64), GridMeasure.haar(128))
    out = convolve(GridMeasure.haar(64), GridMeasure.haar(128), resample=True)
    assert out.N == 64


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_convolution_multiplicativity(seed):
    rng = np.random.default_rng(seed)
    N = 2**12
    a = GridMeasure(rng.dirichlet(np.full(N, 0.3)))
    b = AtomicMeasure(rng.random(3), rng.dirichlet(np.ones(3)))
    c = convolve(a, b.to_grid(N))
    w = 300
    assert np.max(np.abs(c.fourier(w).coeffs - a.fourier(w).coeffs * b.to_grid(N).fourier(w).coeffs)) <= 1e-8


def test_fft_convolution_matches_direct():
    rng = np.random.default_rng(3)
    a = rng.dirichlet(np.ones(128))
    b = np.zeros(128)
    b[[0, 5, 77]] = [0.2, 0.5, 0.3]
    c = convolve(GridMeasure(a), GridMeasure(b))
    assert np.allclose(c.weights, direct_circular_convolution(b, a), atol=1e-15)


def test_symmetric_convolution_stays_symmetric():
    a = CantorMeasure(0.2, 0.05, 0.2, (0.0, 0.4, 0.8), symmetrized=True).to_grid(2**12)
    c = convolve(a, smooth())
    assert is_symmetric(c, 400, tol=1e-10).symmetric


def test_m_infinity_examples():
    d = m_infinity(AtomicMeasure.dirac(), 20, 1024)
    assert d.weights[0] == 1 and np.count_nonzero(d.weights) == 1
    mu = CantorMeasure(0.2, 0.05, 0.2, (0.0, 0.4, 0.8), symmetrized=True)
    r = m_infinity(mu, 20, 2**12)
    c = mu.to_grid(2**12).fourier(300).coeffs
    got = r.fourier(300).coeffs
    assert got[300] == 1
    assert np.max(np.abs(got - minf_partial_sum(c, 20))) < 1e-12
    assert np.max(np.abs(got - m_infinity_closed_form(c))) <= 2.0**-20 + 1e-8
    with pytest.raises(ValueError):
        m_infinity(mu, 0)


def test_support_cells_examples():
    assert support_cells(AtomicMeasure.dirac(), 5) == {0}
    assert support_cells(GridMeasure.haar(256), 6) == set(range(64))
    for D in (1, 2, 4):
        mu = CantorMeasure(0.25, 0.25, 0.25, (0.0, 0.75), depth=D)
        cells = support_cells(mu, 1 + 2 * D)
        assert len(cells) == 2**D
    mu = CantorMeasure(0.25, 0.25, 0.25, (0.0, 0.75), depth=3)
    assert support_cells(mu, 3) == {0, 3}


@given(st.integers(2, 9))
def test_support_monotone_under_refinement(k):
    mu = CantorMeasure(0.3, 0.07, 0.2, (0.0, 0.5, 0.8), symmetrized=True)
    fine = support_cells(mu, k + 1)
    coarse = support_cells(mu, k)
    assert {j // 2 for j in fine} <= coarse


def test_singularity_score_examples():
    mu = smooth()
    assert singularity_score(mu, mu, 8) == pytest.approx(1)
    scores = [singularity_score(MIDDLE_THIRDS, GridMeasure.haar(2**16), k) for k in (4, 6, 8, 10, 12)]
    assert np.all(np.diff(scores) < 0)
    # dyadic level k resolves roughly k log3(2) triadic generations
    for k, s in zip((4, 6, 8, 10, 12), scores):
        g = k * np.log(2) / np.log(3)
        assert s <= 2.0 * (2 / 3) ** (g / 2)


def test_family_allocation_and_disjointness():
    p = FamilyParams(1)
    a, b = cantor_family("0", p), cantor_family("1", p)
    assert p.arc_list() == [(0.0625, 0.0625), (0.3125, 0.0625)]
    assert is_symmetric(a, 200).symmetric and is_symmetric(b, 200).symmetric
    for k in range(p.construction_level, p.construction_level + 8):
        assert singularity_score(a, b, k) == 0
    with pytest.raises(ValueError):
        FamilyParams(1, arcs=((0.1, 0.2), (0.2, 0.1)))
    with pytest.raises(ValueError):
        cantor_family("012", FamilyParams(3))


def test_family_haar_affinity_decreases():
    p = FamilyParams(2)
    for x in ("00", "01", "10", "11"):
        mu = cantor_family(x, p)
        vals = [haar_affinity(mu, p.construction_level + 3 * j) for j in range(4)]
        assert np.all(np.diff(vals) < 0)


def test_h_space_rep():
    N = 32
    mu = GridMeasure.from_density(lambda t: 1.5 + np.cos(2 * np.pi * t), N)
    U0, rep = h_space_rep(mu, 0)
    assert np.allclose(U0, np.eye(U0.shape[0]))
    assert rep.conj_residual() <= 1e-10
    one = grid_function(mu, np.ones(N)).coeffs
    for n in (1, 3, 7):
        Un, _ = h_space_rep(mu, n)
        assert np.vdot(one, Un @ one) == pytest.approx(mu.fourier(8).coeff(n), abs=1e-13)
        assert np.allclose(np.linalg.matrix_power(rep.gen, n), Un, atol=1e-10)
    with pytest.raises(ValueError):
        h_space_rep(GridMeasure(np.r_[0, 0.5, 0.5, 0, 0, 0, 0, 0]), 1)


def test_measure_json_roundtrip():
    for mu in (AtomicMeasure([0.1, 0.4], [0.25, 0.75]), smooth(64), MIDDLE_THIRDS):
        back = measure_from_dict(measure_to_dict(mu))
        assert np.allclose(back.fourier(20).coeffs, mu.fourier(20).coeffs, atol=1e-15)
    with pytest.raises(ValueError):
        measure_from_dict({"type": "blob"})
