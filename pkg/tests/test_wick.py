import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freefock.fock import CutoffError, FockVector, HilbertSpec, HVector
from freefock.sampling import random_expression, random_letter, random_space
from freefock.wick import (
    PreconditionError,
    W,
    WickExpression,
    centered,
    freeness_probe,
    pairing,
    semicircle_moment,
    trace,
    vacuum_image,
    wick_adjoint,
    wick_apply,
    wick_apply_right,
    wick_product,
)

from oracles import (
    count_noncrossing_pairings,
    dense_wick,
    semicircle_integral,
    to_dense,
    vacuum_dense,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132]


def test_catalan_oracle_agrees_with_closed_form():
    for k in range(7):
        assert count_noncrossing_pairings(2 * k) == math.comb(2 * k, k) // (k + 1) == CATALAN[k]


@pytest.mark.parametrize("k", range(1, 7))
def test_even_semicircle_moments_are_catalan(k):
    e = HVector.basis(HilbertSpec(2), 0)
    v = semicircle_moment(e, 2 * k)
    assert v == pytest.approx(count_noncrossing_pairings(2 * k), rel=1e-12)
    assert v == pytest.approx(semicircle_integral(2 * k), rel=1e-9)


def test_odd_moments_vanish_and_norm_scaling():
    e = HVector(HilbertSpec(1), [2.0])
    assert semicircle_moment(e, 5) == 0.0
    assert semicircle_moment(e, 4) == pytest.approx(2 * 2**4)


def test_moment_cutoff_checks():
    e = HVector.basis(HilbertSpec(1), 0)
    with pytest.raises(CutoffError):
        semicircle_moment(e, 6, cutoff=2)
    with pytest.raises(PreconditionError):
        semicircle_moment(HVector(HilbertSpec(2, (1, 0)), [1, 0]), 2)


def test_wick_word_on_vacuum_is_the_tensor(rng):
    sp = random_space(3, rng)
    a, b, c = (random_letter(sp, rng) for _ in range(3))
    out = vacuum_image(W(a, b, c))
    assert out.allclose(FockVector.from_tensor(sp, 3, [a, b, c]), atol=1e-12)


def test_w_of_real_letter_is_creation_plus_annihilation():
    sp = HilbertSpec(2)
    e = HVector(sp, [0.6, 0.8])
    x = W(e)
    psi = vacuum_image(W(e, e), 3)
    from freefock.fock import annihilate, create

    assert wick_apply(x, psi).allclose(create(e, psi) + annihilate(e, psi))


def test_pairing_is_symmetric_bilinear(rng):
    sp = random_space(4, rng)
    e, f = random_letter(sp, rng), random_letter(sp, rng)
    assert pairing(e, f) == pytest.approx(pairing(f, e))
    assert pairing(e, f * 2j) == pytest.approx(2j * pairing(e, f))


def test_two_letter_product_rule():
    sp = HilbertSpec(2, (1, 0))
    e, f = HVector(sp, [1, 2]), HVector(sp, [3j, 1])
    prod = wick_product(W(e), W(f))
    want = W(e, f) + pairing(e, f)
    assert (prod - want).terms == () and abs((prod - want).scalar) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_symbolic_product_matches_dense_operators(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(2, rng)
    x, y = random_expression(sp, rng, 2), random_expression(sp, rng, 2)
    L = 4
    Mx, My, Mxy = dense_wick(x, L), dense_wick(y, L), dense_wick(wick_product(x, y), L)
    om = vacuum_dense(2, L)
    assert np.allclose(Mxy @ om, Mx @ (My @ om), atol=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_sparse_apply_matches_dense(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(2, rng)
    x = random_expression(sp, rng, 3)
    L = 4
    psi = vacuum_image(random_expression(sp, rng, 1), L)
    assert np.allclose(to_dense(wick_apply(x, psi)), dense_wick(x, L) @ to_dense(psi), atol=1e-10)


def test_adjoint_is_operator_adjoint(rng):
    sp = random_space(2, rng)
    x = random_expression(sp, rng, 3)
    L = 4
    assert np.allclose(dense_wick(wick_adjoint(x), L), dense_wick(x, L).conj().T, atol=1e-10)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_algebra_identities(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(2, rng)
    x, y, z = (random_expression(sp, rng, 2) for _ in range(3))
    lhs = vacuum_image(wick_product(wick_product(x, y), z), 6)
    rhs = vacuum_image(wick_product(x, wick_product(y, z)), 6)
    assert lhs.allclose(rhs, atol=1e-9 * max(1, lhs.norm()))
    a = wick_adjoint(wick_product(x, y))
    b = wick_product(wick_adjoint(y), wick_adjoint(x))
    assert vacuum_image(a, 4).allclose(vacuum_image(b, 4), atol=1e-9 * max(1, vacuum_image(a).norm()))
    assert trace(wick_product(x, y)) == pytest.approx(trace(wick_product(y, x)), rel=1e-10, abs=1e-10)
    assert trace(wick_adjoint(x)) == pytest.approx(np.conj(trace(x)))


def test_trace_is_positive(rng):
    sp = random_space(3, rng)
    x = random_expression(sp, rng, 3)
    t = trace(wick_product(wick_adjoint(x), x))
    assert t.real > 0 and abs(t.imag) < 1e-10
    assert t.real == pytest.approx(vacuum_image(x).norm() ** 2, rel=1e-10)


def test_left_and_right_actions_commute(rng):
    sp = random_space(2, rng)
    x, y = random_expression(sp, rng, 2), random_expression(sp, rng, 2)
    psi = vacuum_image(random_expression(sp, rng, 2), 6)
    a = wick_apply(x, wick_apply_right(y, psi))
    b = wick_apply_right(y, wick_apply(x, psi))
    assert a.allclose(b, atol=1e-9)


def test_right_action_on_vacuum_is_the_same_vector(rng):
    sp = random_space(3, rng)
    y = random_expression(sp, rng, 2)
    om = FockVector.vacuum(sp, 2)
    assert wick_apply_right(y, om).allclose(wick_apply(y, om), atol=1e-12)


def test_power_and_scalar_arithmetic():
    sp = HilbertSpec(1)
    e = HVector.basis(sp, 0)
    x = W(e)
    assert trace(x**4) == pytest.approx(2)
    assert trace(centered(x + 3)) == 0
    assert trace(2 * x**2 - 1) == pytest.approx(1)


def test_json_roundtrip(rng):
    sp = random_space(3, rng)
    x = random_expression(sp, rng, 3)
    back = WickExpression.from_json(x.to_json(), sp)
    assert vacuum_image(back - x, 3).norm() < 1e-12


def _free_families():
    sp = HilbertSpec(2)
    a, b = W(HVector.basis(sp, 0)), W(HVector.basis(sp, 1))
    fa = [a, centered(a**2), centered(a**3)]
    fb = [b, centered(b**2), centered(b**3)]
    return [fa, fb]


def test_freeness_alternating_centered_products_vanish():
    fams = _free_families()
    pattern = [(0, 1), (1, 0), (0, 0), (1, 2)]
    assert abs(freeness_probe(fams, pattern)) < 1e-12


def test_freeness_probe_rejects_bad_patterns():
    fams = _free_families()
    with pytest.raises(PreconditionError):
        freeness_probe(fams, [(0, 0), (0, 1)])
    with pytest.raises(PreconditionError):
        freeness_probe(fams, [(0, 0)])
    sp = HilbertSpec(2)
    with pytest.raises(PreconditionError):
        freeness_probe([[W(HVector.basis(sp, 0)) ** 2], fams[1]], [(0, 0), (1, 0)])


def test_non_alternating_product_is_not_zero():
    a = _free_families()[0][1]
    assert abs(trace(wick_product(a, a))) > 0.5
