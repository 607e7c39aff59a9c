import numpy as np
import pytest
from hypothesis import given, strategies as st

from nocorr.gellmann import (
    ANTISYMMETRIC, DIAGONAL, SYMMETRIC, antisymmetric_subset, coefficients, gellmann_basis,
)
from oracles import PAULI, gellmann_formula, qutrit_basis_in_package_order


def test_qubit_basis_is_pauli():
    assert all(np.array_equal(a, b) for a, b in zip(gellmann_basis(2).elements, PAULI))


def test_qutrit_basis_matches_textbook():
    for a, b in zip(gellmann_basis(3).elements, qutrit_basis_in_package_order()):
        assert np.allclose(a, b, atol=1e-15)


@pytest.mark.parametrize("d", range(2, 8))
def test_matches_closed_form(d):
    for a, b in zip(gellmann_basis(d).elements, gellmann_formula(d), strict=True):
        assert np.allclose(a, b, atol=1e-15)


@pytest.mark.parametrize("d", range(2, 8))
def test_orthonormality_and_tracelessness(d):
    b = gellmann_basis(d)
    assert len(b) == d * d - 1
    E = np.array(b.elements)
    gram = np.einsum("aij,bji->ab", E, E)
    assert np.allclose(gram, 2 * np.eye(d * d - 1), atol=1e-12)
    assert np.allclose(np.trace(E, axis1=1, axis2=2), 0)
    assert all(np.allclose(m, m.conj().T) for m in E)


def test_kinds_and_labels():
    b = gellmann_basis(4)
    pairs = 6
    assert b.kinds == (SYMMETRIC,) * pairs + (ANTISYMMETRIC,) * pairs + (DIAGONAL,) * 3
    assert b.labels[0] == (0, 1) and b.labels[pairs - 1] == (2, 3)
    assert b.index_of(DIAGONAL, 1) == 2 * pairs + 1
    with pytest.raises(KeyError):
        b.index_of(DIAGONAL, 9)


def test_operators_start_with_identity():
    ops = gellmann_basis(3).operators
    assert ops.shape == (9, 3, 3)
    assert np.array_equal(ops[0], np.eye(3))


def test_antisymmetric_subset_is_imaginary():
    for m in antisymmetric_subset(gellmann_basis(5)):
        assert np.allclose(m.real, 0)


def test_rejects_small_dimension():
    with pytest.raises(ValueError):
        gellmann_basis(1)


@given(d=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_expansion_roundtrip(d, seed):
    gen = np.random.default_rng(seed)
    g = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    h = g + g.conj().T
    c = coefficients(h, d)
    ops = gellmann_basis(d).operators
    back = c[0] * ops[0] / d + np.tensordot(c[1:], ops[1:], axes=1) / 2
    assert np.allclose(back, h, atol=1e-12)
