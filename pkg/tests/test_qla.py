import numpy as np
import pytest
from hypothesis import given, strategies as st

from nocorr.qla import (
    DensityMatrix, StateError, density_from_json, herm_eig, is_psd, kron, matrix_from_json,
    matrix_to_json, maximally_mixed, min_eig, partial_trace, partial_transpose,
    partial_transpose_permutation,
)
from oracles import partial_trace_naive, partial_transpose_naive, random_density

dims_strategy = st.lists(st.integers(2, 3), min_size=2, max_size=3)


def test_kron_mixed_product(gen):
    A, B, C, D = (gen.standard_normal((2, 2)) for _ in range(4))
    assert np.allclose(kron(A, B) @ kron(C, D), kron(A @ C, B @ D))


def test_kron_needs_operand():
    with pytest.raises(ValueError):
        kron()


@pytest.mark.parametrize("size", [1, 2, 5, 9, 27])
def test_herm_eig_reconstructs(gen, size):
    g = gen.standard_normal((size, size)) + 1j * gen.standard_normal((size, size))
    h = g + g.conj().T
    w, v = herm_eig(h)
    assert np.all(np.diff(w) >= -1e-12)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) <= 1e-9


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        herm_eig(np.array([[0, 1], [0, 0]]))


def test_density_invariants():
    with pytest.raises(StateError):
        DensityMatrix(np.diag([0.5, 0.6]), (2,))  # trace
    with pytest.raises(StateError):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))  # negative eigenvalue
    with pytest.raises(StateError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]), (2,))  # not Hermitian
    with pytest.raises(StateError):
        DensityMatrix(np.eye(4) / 4, (3,))  # dims


def test_density_is_read_only():
    rho = maximally_mixed((2, 2))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_local_dim_requires_equal_parties():
    with pytest.raises(ValueError):
        maximally_mixed((2, 3)).local_dim


def test_partial_trace_of_product():
    a = np.diag([0.7, 0.3])
    b = np.eye(3) / 3
    rho = DensityMatrix(np.kron(a, b), (2, 3))
    assert np.allclose(partial_trace(rho, [0]).matrix, a)
    assert np.allclose(partial_trace(rho, [1]).matrix, b)
    full = partial_trace(rho, [])
    assert full.dims == (1,) and full.matrix[0, 0] == pytest.approx(1)
    with pytest.raises(ValueError):
        partial_trace(rho, [2])


@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1), data=st.data())
def test_partial_trace_matches_index_loops(dims, seed, data):
    gen = np.random.default_rng(seed)
    D = int(np.prod(dims))
    g = gen.standard_normal((D, D)) + 1j * gen.standard_normal((D, D))
    m = g @ g.conj().T
    m /= np.trace(m).real
    keep = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1))
    got = partial_trace(DensityMatrix(m, tuple(dims)), keep).matrix
    assert np.allclose(got, partial_trace_naive(m, dims, keep), atol=1e-12)


@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1), data=st.data())
def test_partial_transpose_matches_index_loops(dims, seed, data):
    gen = np.random.default_rng(seed)
    D = int(np.prod(dims))
    m = gen.standard_normal((D, D)) + 1j * gen.standard_normal((D, D))
    subset = data.draw(st.sets(st.integers(0, len(dims) - 1)))
    got = partial_transpose(m, subset, dims)
    assert np.array_equal(got, partial_transpose_naive(m, dims, subset))
    # the permutation form agrees, and transposing twice is the identity
    assert np.array_equal(m.ravel()[partial_transpose_permutation(dims, subset)], got.ravel())
    assert np.array_equal(partial_transpose(got, subset, dims), m)
    assert np.trace(got) == pytest.approx(np.trace(m))


def test_partial_transpose_detects_entanglement():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = DensityMatrix(np.outer(psi, psi), (2, 2))
    assert min_eig(partial_transpose(rho, [0])) == pytest.approx(-0.5)
    assert is_psd(partial_transpose(maximally_mixed((2, 2)), [1]))


def test_partial_transpose_needs_dims_for_raw_arrays():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4), [0])


def test_json_roundtrip(gen):
    m = random_density(3, 2, gen)
    obj = matrix_to_json(m, (3, 3))
    back, dims = matrix_from_json(obj)
    assert dims == [3, 3]
    assert np.max(np.abs(back - m)) < 1e-11
    assert density_from_json(obj).dims == (3, 3)


def test_json_rejects_malformed():
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 2, "cols": 2, "re": [1, 0, 0]})
    with pytest.raises(ValueError):
        matrix_from_json({"cols": 2})
