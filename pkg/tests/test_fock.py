import numpy as np
import pytest
from hypothesis import given, strategies as st

from freefock.fock import (
    CutoffError,
    DimensionError,
    FockVector,
    HilbertSpec,
    HVector,
    annihilate,
    apply_letterwise,
    conj_vector,
    create,
    h_inner,
    inner,
    modular_conjugation,
    required_cutoff,
)

from oracles import dense_creation, to_dense

SWAP = HilbertSpec(3, (1, 0, 2))


def random_fock(space, L, rng, density=0.7):
    coeffs = {}
    for n in range(L + 1):
        for w in np.ndindex(*(space.dim,) * n):
            if rng.random() < density:
                coeffs[w] = complex(rng.standard_normal(), rng.standard_normal())
    return FockVector(space, L, coeffs)


def test_conj_perm_must_be_an_involution():
    with pytest.raises(ValueError):
        HilbertSpec(3, (1, 2, 0))
    with pytest.raises(ValueError):
        HilbertSpec(2, (0, 0))


def test_real_basis_is_unitary_and_conj_fixed():
    B = SWAP.real_basis()
    assert np.allclose(B.conj().T @ B, np.eye(3))
    for col in B.T:
        assert HVector(SWAP, col).is_real()


def test_creation_on_vacuum_and_words():
    e = HVector(SWAP, [1, 2j, 0])
    om = FockVector.vacuum(SWAP, 2)
    one = create(e, om)
    assert one.coeffs == {(0,): 1, (1,): 2j}
    two = create(HVector.basis(SWAP, 2), one)
    assert two.coeffs == {(2, 0): 1, (2, 1): 2j}


def test_create_past_cutoff_records_dropped_mass():
    e = HVector(SWAP, [1, 1, 0])
    psi = FockVector.word(SWAP, 1, (2,), 3.0)
    out = create(e, psi)
    assert out.coeffs == {}
    assert out.dropped == pytest.approx(2 * 9.0)


def test_word_longer_than_cutoff_rejected():
    with pytest.raises(CutoffError):
        FockVector.word(SWAP, 1, (0, 1))
    with pytest.raises(DimensionError):
        FockVector.word(SWAP, 2, (5,))


def test_annihilate_matches_dense_adjoint(rng):
    L = 3
    e = HVector(SWAP, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    psi = random_fock(SWAP, L, rng)
    A = dense_creation(e.coeffs, L).conj().T
    assert np.allclose(to_dense(annihilate(e, psi)), A @ to_dense(psi))


@given(st.integers(0, 2**32 - 1))
def test_create_annihilate_adjoint(seed):
    rng = np.random.default_rng(seed)
    L = 3
    e = HVector(SWAP, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    psi, phi = random_fock(SWAP, L - 1, rng).with_cutoff(L), random_fock(SWAP, L, rng)
    assert inner(create(e, psi), phi) == pytest.approx(inner(psi, annihilate(e, phi)), abs=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_modular_conjugation_is_antiunitary_involution(seed):
    rng = np.random.default_rng(seed)
    psi, phi = random_fock(SWAP, 3, rng), random_fock(SWAP, 3, rng)
    Jpsi = modular_conjugation(psi)
    assert modular_conjugation(Jpsi).allclose(psi)
    assert inner(Jpsi, modular_conjugation(phi)) == pytest.approx(np.conj(inner(psi, phi)), abs=1e-10)


def test_modular_conjugation_of_elementary_tensor():
    a, b = HVector(SWAP, [1, 2j, 0]), HVector(SWAP, [0, 1, 3])
    psi = FockVector.from_tensor(SWAP, 2, [a, b])
    want = FockVector.from_tensor(SWAP, 2, [conj_vector(b), conj_vector(a)])
    assert modular_conjugation(psi).allclose(want)


def test_letterwise_unitary_preserves_norm(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    psi = random_fock(SWAP, 3, rng)
    out = apply_letterwise(Q, psi)
    assert out.norm() == pytest.approx(psi.norm())
    assert out.coeffs.get((), 0) == psi.coeffs.get((), 0)


def test_h_inner_is_linear_in_first_argument():
    e, f = HVector(SWAP, [1j, 0, 0]), HVector(SWAP, [1, 0, 0])
    assert h_inner(e, f) == 1j
    assert h_inner(f, e) == -1j


def test_json_roundtrip(rng):
    psi = random_fock(SWAP, 2, rng)
    back = FockVector.from_json(psi.to_json(), SWAP, 2)
    assert back.allclose(psi, atol=0)


def test_required_cutoff():
    assert [required_cutoff(k) for k in range(7)] == [0, 1, 1, 2, 2, 3, 3]


def test_cutoff_mismatch_in_sum():
    with pytest.raises(DimensionError):
        FockVector.vacuum(SWAP, 1) + FockVector.vacuum(SWAP, 2)
