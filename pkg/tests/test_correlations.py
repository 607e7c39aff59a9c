from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nocorr.correlations import (
    TOTAL, CorrelationTensor, corr_tensor, corr_value, expansion_weights, index_weights,
    observable, reconstruct, sigma,
)
from nocorr.qla import DensityMatrix, kron, maximally_mixed
from nocorr.states import density, haar_random_pure, named_state
from oracles import SIGMA_TABLE, corr_tensor_naive, random_density


@pytest.mark.parametrize("d,n", [(2, 2), (2, 3), (3, 2)])
def test_tensor_matches_explicit_traces(gen, d, n):
    m = random_density(d, n, gen)
    t = corr_tensor(DensityMatrix(m, (d,) * n))
    assert np.allclose(t.values, corr_tensor_naive(m, d, n), atol=1e-12)


def test_maximally_mixed_has_only_identity_term():
    t = corr_tensor(maximally_mixed((3, 3, 3)))
    assert t[(0, 0, 0)] == pytest.approx(1)
    assert np.count_nonzero(np.abs(t.values) > 1e-14) == 1


def test_expansion_weights_three_qutrits():
    w = expansion_weights(3, 3)
    assert w[0, 0, 0] == pytest.approx(1 / 27)
    assert w[1, 0, 0] == pytest.approx(1 / 18)
    assert w[0, 4, 5] == pytest.approx(1 / 12)
    assert w[8, 8, 8] == pytest.approx(1 / 8)
    assert index_weights(3, 3)[0, 2, 7] == 2


@given(seed=st.integers(0, 2**32 - 1), dn=st.sampled_from([(2, 3), (3, 3), (3, 2), (4, 2)]))
def test_reconstruct_roundtrip(seed, dn):
    d, n = dn
    rho = density(haar_random_pure(d, n, seed))
    back = reconstruct(corr_tensor(rho))
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-12


def test_reconstruct_rejects_incomplete_tensor():
    t = CorrelationTensor.from_mapping(2, 1, {(0,): 1.0})
    with pytest.raises(ValueError):
        reconstruct(t)


def test_tensor_shape_validation():
    with pytest.raises(ValueError):
        CorrelationTensor(3, 2, np.zeros((9, 8)))


@pytest.mark.parametrize("name", "abcde")
def test_sigma_named_states(name):
    t = corr_tensor(density(named_state(name)))
    for k, want in enumerate(SIGMA_TABLE[(name, "original")], start=1):
        assert abs(sigma(t, k) - float(want)) <= 1e-10


def test_total_convention_multiplies_by_placements_for_symmetric_states():
    t = corr_tensor(density(named_state("b")))
    assert sigma(t, 1, TOTAL) == pytest.approx(3 * sigma(t, 1))
    assert sigma(t, 2, TOTAL) == pytest.approx(3 * sigma(t, 2))
    assert sigma(t, 3, TOTAL) == pytest.approx(sigma(t, 3))
    assert Fraction(sigma(t, 1, TOTAL)).limit_denominator(1000) == Fraction(4, 3)


def test_sigma_rejects_bad_arguments():
    t = corr_tensor(maximally_mixed((2, 2)))
    with pytest.raises(ValueError):
        sigma(t, 0)
    with pytest.raises(ValueError):
        sigma(t, 1, "weird")


def test_corr_value_matches_trace(gen):
    m = random_density(3, 3, gen)
    t = corr_tensor(DensityMatrix(m, (3, 3, 3)))
    obs = [gen.standard_normal(8) for _ in range(3)]
    direct = np.trace(m @ kron(*(observable(v, 3) for v in obs))).real
    assert corr_value(t, obs) == pytest.approx(direct, abs=1e-10)
    with pytest.raises(ValueError):
        corr_value(t, obs[:2])
    with pytest.raises(ValueError):
        corr_value(t, [np.ones(3)] * 3)
